#include "nlslab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include "nlslab/errors.hpp"

namespace nlslab {

namespace {

using Gauss = boost::math::quadrature::gauss<double, kGaussOrder>;

}  // namespace

void append_gauss_panel(QuadratureRule& rule, double a, double b) {
  // boost stores the nonnegative abscissae only; mirror them.
  const auto& x = Gauss::abscissa();
  const auto& w = Gauss::weights();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = x.size(); i-- > 0;) {
    rule.nodes.push_back(mid - half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    rule.nodes.push_back(mid + half * x[i]);
    rule.weights.push_back(half * w[i]);
  }
}

QuadratureRule gauss_legendre(double a, double b, std::size_t panels) {
  if (panels == 0) throw ConfigError("quadrature needs at least one panel");
  if (!(b > a)) throw ConfigError("quadrature interval must have b > a");
  QuadratureRule rule;
  rule.nodes.reserve(panels * kGaussOrder);
  rule.weights.reserve(panels * kGaussOrder);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double hi = p + 1 == panels ? b : lo + h;
    append_gauss_panel(rule, lo, hi);
  }
  return rule;
}

}  // namespace nlslab
