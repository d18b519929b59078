#include "nlslab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nlslab/errors.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/transforms.hpp"

namespace nlslab {

DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   std::optional<std::pair<double, double>> window) {
  if (times.size() != values.size()) throw ConfigError("fit_decay: times and values differ in length");
  std::vector<double> xs, ys;
  DecayFit fit;
  fit.t_lo = std::numeric_limits<double>::infinity();
  fit.t_hi = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (window && (t < window->first || t > window->second)) continue;
    if (!(t > 0.0)) throw ConfigError("fit_decay: times must be positive");
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "fit_decay: value %.6g at t=%.6g is not positive", values[i], t);
      throw ConfigError(buf);
    }
    xs.push_back(std::log(t));
    ys.push_back(std::log(values[i]));
    fit.t_lo = std::min(fit.t_lo, t);
    fit.t_hi = std::max(fit.t_hi, t);
  }
  const std::size_t n = xs.size();
  if (n < kMinFitSamples) {
    throw ConfigError("fit_decay: need at least 8 samples, got " + std::to_string(n));
  }
  if (fit.t_hi < 10.0 * fit.t_lo * (1.0 - 1e-12)) {
    throw ConfigError("fit_decay: samples must span at least one decade");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.exponent = sxy / sxx;
  const double intercept = my - fit.exponent * mx;
  fit.constant = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (intercept + fit.exponent * xs[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / double(n));
  fit.samples = n;
  return fit;
}

double profile_l1_norm(const ScatteringProfile& u, double half_width, double spacing) {
  if (u.is_zero()) return 0.0;
  const auto count = static_cast<std::size_t>(std::ceil(2.0 * half_width / spacing)) + 1;
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = -half_width + spacing * double(i);
  std::vector<cplx> vals(count);
  u.evolve(0.0, xs, vals, 0, u.nodes_for(0.0, half_width));
  double s = 0.0;
  for (std::size_t i = 0; i < count; ++i) s += (i == 0 || i + 1 == count ? 0.5 : 1.0) * std::abs(vals[i]);
  return s * spacing;
}

std::vector<DispersionMargin> check_dispersion(const ScatteringProfile& u, std::span<const double> times,
                                               double pad, double spacing) {
  const double l1 = profile_l1_norm(u);
  std::vector<DispersionMargin> out;
  for (double t : times) {
    if (!(t > 0.0)) throw ConfigError("check_dispersion needs t > 0");
    DispersionMargin d{t, 0.0, 0.0, l1, l1 / std::sqrt(4.0 * kPi * t), l1 / std::sqrt(t), 0.0, 0.0};
    if (!u.is_zero()) {
      const double a = 2.0 * t * u.lo() - pad;
      const double b = 2.0 * t * u.hi() + pad;
      const auto count = static_cast<std::size_t>(std::ceil((b - a) / spacing)) + 1;
      std::vector<double> xs(count);
      for (std::size_t i = 0; i < count; ++i) xs[i] = a + spacing * double(i);
      std::vector<cplx> vals(count);
      u.evolve(t, xs, vals, 0, u.nodes_for(t, std::max(std::abs(a), std::abs(b))));
      std::size_t best = 0;
      for (std::size_t i = 0; i < count; ++i) {
        if (std::abs(vals[i]) > std::abs(vals[best])) best = i;
      }
      d.sup = std::abs(vals[best]);
      d.argmax = xs[best];
      if (best < count / 100 || best >= count - count / 100) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "check_dispersion: supremum at the window edge (x=%.6g, t=%.6g); widen the window",
                      d.argmax, t);
        throw ConfigError(buf);
      }
    }
    d.sharp_margin = d.sharp_bound - d.sup;
    d.loose_margin = d.loose_bound - d.sup;
    out.push_back(d);
  }
  return out;
}

std::vector<GnMargin> check_gn(std::span<const ComplexField> fields) {
  std::vector<GnMargin> out;
  for (const auto& f : fields) {
    const double frac = boundary_mass_fraction(f);
    if (!std::isfinite(frac) || frac > kBoundaryMassThreshold) throw BoundaryMassError("check_gn", frac);
    const double sup = lebesgue_sup(f);
    GnMargin g{sup * sup, l2_norm(f) * derivative_norm(f, 1), 0.0};
    g.margin = g.product - g.sup_sq;
    out.push_back(g);
  }
  return out;
}

namespace {

DecayReportRow finish_row(int k, std::vector<double> times, std::vector<double> values,
                          std::optional<std::pair<double, double>> window) {
  DecayReportRow row{k, std::move(times), std::move(values), {}, false};
  row.exact_match = std::all_of(row.values.begin(), row.values.end(), [](double v) { return v == 0.0; });
  if (!row.exact_match) row.fit = fit_decay(row.times, row.values, window);
  return row;
}

}  // namespace

std::vector<DecayReportRow> nls_decay_report(const FieldFamily& v, const FieldFamily& v1, int k_max,
                                             std::optional<std::pair<double, double>> window) {
  const FieldFamily d = difference(v, v1);
  std::vector<DecayReportRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    std::vector<double> vals;
    for (const auto& f : d.fields) vals.push_back(derivative_norm(f, k));
    rows.push_back(finish_row(k, d.times, std::move(vals), window));
  }
  return rows;
}

std::vector<DecayReportRow> transformed_decay_report(const FieldFamily& v, const FieldFamily& v1, double M,
                                                     int sigma, int k_max,
                                                     std::optional<std::pair<double, double>> t_window) {
  const FieldFamily d = difference(v, v1);
  // Ascending in s = 1/t.
  std::vector<double> ss;
  std::vector<ComplexField> psi;
  for (std::size_t i = d.size(); i-- > 0;) {
    const double s = 1.0 / d.times[i];
    ss.push_back(s);
    psi.push_back(wick_phase(pseudo_conformal_scaled(d.fields[i], s), s, M, 1, double(sigma)));
  }
  std::optional<std::pair<double, double>> s_window;
  if (t_window) s_window = std::make_pair(1.0 / t_window->second, 1.0 / t_window->first);
  std::vector<DecayReportRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < ss.size(); ++i) vals.push_back(l2_norm(j_power_dechirped(psi[i], ss[i], k)));
    rows.push_back(finish_row(k, ss, std::move(vals), s_window));
  }
  return rows;
}

}  // namespace nlslab
