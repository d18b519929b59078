#include "nlslab/transforms.hpp"

#include <cmath>
#include <cstdio>

#include "nlslab/errors.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0)) throw ConfigError("pseudo-conformal transform needs t > 0");
}

cplx chirp(double x, double t) { return std::polar(1.0, x * x / (4.0 * t)); }

// e^{i pi/4} (-ix/2)^k conj(hat u(x/2)) / sqrt(4 pi), or with (x/2)^k.
cplx limit_object(const ScatteringProfile& u, double x, int k, bool with_phase) {
  const cplx base = std::polar(1.0 / std::sqrt(4.0 * kPi), kPi / 4.0) * u.hat(0.5 * x);
  const cplx fac = with_phase ? cplx(0.0, -0.5 * x) : cplx(0.5 * x, 0.0);
  return base * std::pow(fac, k);
}

LimitDefect limit_defect_from(const ScatteringProfile& u, const ComplexField& transformed, double t, int k) {
  const auto& g = transformed.grid();
  double d1 = 0.0, d2 = 0.0, ln = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    const cplx a = limit_object(u, x, k, true);
    const cplx b = limit_object(u, x, k, false);
    d1 += std::norm(transformed[i] - a);
    d2 += std::norm(transformed[i] - b);
    ln += std::norm(a);
  }
  const double dx = g.spacing();
  return {t, k, std::sqrt(d1 * dx), std::sqrt(d2 * dx), std::sqrt(ln * dx)};
}

}  // namespace

ComplexField pseudo_conformal(const MeshlessField& f, double t, const SpectralGrid& outer,
                              std::optional<std::pair<double, double>> reliable) {
  require_positive_time(t);
  std::vector<double> ys(outer.size());
  for (std::size_t i = 0; i < outer.size(); ++i) {
    ys[i] = outer.x(i) / t;
    if (reliable && (ys[i] < reliable->first || ys[i] > reliable->second)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "pseudo_conformal: inner point %.6g outside the reliable range [%.6g, %.6g]",
                    ys[i], reliable->first, reliable->second);
      throw ConfigError(buf);
    }
  }
  std::vector<cplx> inner(outer.size());
  f(ys, inner);
  ComplexField out(outer, Representation::physical);
  const double s = 1.0 / std::sqrt(t);
  for (std::size_t i = 0; i < outer.size(); ++i) out[i] = s * chirp(outer.x(i), t) * std::conj(inner[i]);
  return out;
}

ComplexField pseudo_conformal_scaled(const ComplexField& f, double t) {
  require_positive_time(t);
  const ComplexField p = as_physical(f);
  const auto& g = p.grid();
  const SpectralGrid outer = SpectralGrid::with_length(g.size(), t * g.length());
  ComplexField out(outer, Representation::physical);
  const double s = 1.0 / std::sqrt(t);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = s * chirp(outer.x(i), t) * std::conj(p[i]);
  return out;
}

std::vector<cplx> interpolate(const ComplexField& f, std::span<const double> xs) {
  const ComplexField F = as_frequency(f);
  const auto& g = F.grid();
  std::vector<double> freqs(g.size());
  std::vector<cplx> amps(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    freqs[k] = g.frequency(k);
    amps[k] = F[k] / g.length();
  }
  std::vector<cplx> out(xs.size());
  parallel::trig_sum(freqs, amps, xs, out);
  return out;
}

MeshlessField interpolant(const ComplexField& f) {
  const ComplexField F = as_frequency(f);
  return [F](std::span<const double> xs, std::span<cplx> out) {
    const auto v = interpolate(F, xs);
    std::copy(v.begin(), v.end(), out.begin());
  };
}

ComplexField j_operator(const ComplexField& f, double t) {
  const ComplexField p = as_physical(f);
  ComplexField d = spatial_derivative(p, 1);
  const auto& g = p.grid();
  ComplexField out(g, Representation::physical);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = 0.5 * g.x(i) * p[i] + cplx(0.0, t) * d[i];
  return out;
}

ComplexField j_power_dechirped(const ComplexField& f, double t, int k) {
  require_positive_time(t);
  if (k < 0) throw ConfigError("J power must be nonnegative");
  ComplexField p = as_physical(f);
  if (k == 0) return p;
  const auto& g = p.grid();
  for (std::size_t i = 0; i < g.size(); ++i) p[i] *= std::conj(chirp(g.x(i), t));
  ComplexField d = spatial_derivative(p, k);
  const cplx fac = std::pow(cplx(0.0, t), k);
  for (std::size_t i = 0; i < g.size(); ++i) d[i] *= fac * chirp(g.x(i), t);
  return d;
}

ComplexField wick_phase(const ComplexField& f, double t, double M, int direction, double rate) {
  if (!(t > 0.0)) throw ConfigError("wick_phase needs t > 0");
  if (direction != 1 && direction != -1) throw ConfigError("wick_phase direction must be +1 or -1");
  ComplexField out = f;
  if (M == 0.0 || t == 1.0) return out;
  out *= std::polar(1.0, direction * rate * M * std::log(t));
  return out;
}

double commutation_defect(const ComplexField& f, double t, int k) {
  require_positive_time(t);
  if (k < 0) throw ConfigError("derivative order must be nonnegative");
  if (k == 0) return 0.0;
  const ComplexField lhs = spatial_derivative(pseudo_conformal_scaled(f, t), k);
  ComplexField h = as_physical(f);
  for (int i = 0; i < k; ++i) h = j_operator(h, 1.0 / t);
  h *= std::pow(cplx(0.0, -1.0), k);
  const ComplexField rhs = pseudo_conformal_scaled(h, t);
  ComplexField diff(lhs.grid(), Representation::physical);
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = lhs[i] - rhs[i];
  return l2_norm(diff);
}

LimitDefect small_time_limit_defect(const ScatteringProfile& u, double t, int k, const SpectralGrid& outer) {
  require_positive_time(t);
  double ymax = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) ymax = std::max(ymax, std::abs(outer.x(i)) / t);
  const int nodes = u.nodes_for(1.0 / t, ymax);
  const ComplexField tr = pseudo_conformal(u.evolved(1.0 / t, k, nodes), t, outer);
  return limit_defect_from(u, tr, t, k);
}

LimitDefect small_time_limit_defect_spectral(const ScatteringProfile& u, double t, int k, const SpectralGrid& inner) {
  require_positive_time(t);
  const ComplexField f = u.sample(inner, 1.0 / t, k);
  require_boundary_mass(f, "small-time limit (inner grid)");
  return limit_defect_from(u, pseudo_conformal_scaled(f, t), t, k);
}

}  // namespace nlslab
