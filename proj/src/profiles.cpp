#include "nlslab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nlslab/errors.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

// Truncated Taylor series arithmetic, enough for the bump's derivatives.
using Jet = std::vector<double>;

Jet jet_div(const Jet& f, const Jet& g) {
  Jet h(f.size(), 0.0);
  for (std::size_t k = 0; k < f.size(); ++k) {
    double s = f[k];
    for (std::size_t j = 1; j <= k; ++j) s -= g[j] * h[k - j];
    h[k] = s / g[0];
  }
  return h;
}

Jet jet_pow(const Jet& f, double a) {
  Jet g(f.size(), 0.0);
  g[0] = std::pow(f[0], a);
  for (std::size_t k = 1; k < f.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += ((a + 1.0) * double(j) - double(k)) * f[j] * g[k - j];
    g[k] = s / (double(k) * f[0]);
  }
  return g;
}

Jet jet_exp(const Jet& f) {
  Jet g(f.size(), 0.0);
  g[0] = std::exp(f[0]);
  for (std::size_t k = 1; k < f.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += double(j) * f[j] * g[k - j];
    g[k] = s / double(k);
  }
  return g;
}

bool touches_lattice(double lo, double hi) {
  // Some half-integer h with lo <= h <= hi.
  return std::floor(2.0 * hi) >= std::ceil(2.0 * lo);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

ComplexField sample(const MeshlessField& f, const SpectralGrid& grid) {
  const auto xs = grid.points();
  ComplexField out(grid, Representation::physical);
  f(xs, out.values());
  return out;
}

std::vector<cplx> evaluate(const MeshlessField& f, std::span<const double> xs) {
  std::vector<cplx> out(xs.size());
  f(xs, out);
  return out;
}

double DiracTrain::mass() const {
  double m = 0.0;
  for (const auto& [j, a] : alphas) m += std::norm(a);
  return m;
}

double DiracTrain::weighted_norm() const {
  double s = 0.0;
  for (const auto& [j, a] : alphas) s += std::pow(1.0 + std::abs(j), 2.0 * q) * std::norm(a);
  return std::sqrt(s);
}

double DiracTrain::theta(int j, double t) const {
  const auto it = alphas.find(j);
  const double a2 = it == alphas.end() ? 0.0 : std::norm(it->second);
  return law.rate(a2, mass(), sign) * std::log(t);
}

bool DiracTrain::empty() const {
  return std::all_of(alphas.begin(), alphas.end(), [](const auto& kv) { return kv.second == cplx{}; });
}

std::map<int, cplx> dirac_coefficients(const DiracTrain& train, double t, const ModeRemainders* R) {
  if (!(t > 0.0)) throw ConfigError("the Dirac wave needs t > 0");
  std::map<int, cplx> c;
  for (const auto& [j, a] : train.alphas) {
    cplx amp = std::conj(a);
    if (R) {
      if (auto it = R->find(j); it != R->end()) amp += std::conj(it->second);
    }
    const double jj = static_cast<double>(j) * j;
    c[j] = amp * std::polar(1.0, train.theta(j, t) - t * jj / 4.0);
  }
  return c;
}

MeshlessField dirac_wave(const DiracTrain& train, double t, const ModeRemainders* R) {
  const auto coeffs = dirac_coefficients(train, t, R);
  std::vector<double> freqs;
  std::vector<cplx> amps;
  for (const auto& [j, c] : coeffs) {
    freqs.push_back(0.5 * j);
    amps.push_back(c);
  }
  return [freqs, amps](std::span<const double> xs, std::span<cplx> out) {
    parallel::trig_sum(freqs, amps, xs, out);
  };
}

ComplexField sample_dirac_wave(const DiracTrain& train, double t, const SpectralGrid& grid, const ModeRemainders* R) {
  ComplexField F(grid, Representation::frequency);
  for (const auto& [j, c] : dirac_coefficients(train, t, R)) {
    const auto slot = grid.half_integer_slot(j);
    if (!slot) {
      throw ConfigError("Dirac mode j=" + std::to_string(j) + " is not an exact mode of the grid (beyond Nyquist)");
    }
    F[*slot] += grid.length() * c;
  }
  return from_fourier(F);
}

MeshlessField SingleDirac::u(double t) const {
  if (!(t > 0.0)) throw ConfigError("closed forms need t > 0");
  const cplx pref = alpha * std::polar(1.0, -lambda * std::norm(alpha) * std::log(t)) / std::sqrt(t);
  return [pref, t](std::span<const double> xs, std::span<cplx> out) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = pref * std::polar(1.0, xs[i] * xs[i] / (4.0 * t));
  };
}

MeshlessField SingleDirac::psi(double t) const {
  if (!(t > 0.0)) throw ConfigError("closed forms need t > 0");
  const cplx pref = alpha / std::sqrt(t);
  return [pref, t](std::span<const double> xs, std::span<cplx> out) {
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = pref * std::polar(1.0, xs[i] * xs[i] / (4.0 * t));
  };
}

double single_dirac_lambda(const PhaseLaw& law, int sigma) {
  // u = e^{i sigma M ln t} T(v) for a single mode with M = |alpha|^2.
  return -(sigma + law.kappa * sigma * (law.self + law.mass));
}

SingleDirac single_dirac_closed_forms(cplx alpha, double lambda) { return {alpha, lambda}; }

ScatteringProfile ScatteringProfile::make(const ProfileParams& p) {
  if (!(p.width > 0.0)) throw ConfigError("profile.width must be positive");
  if (!(p.smoothness > 0.0)) throw ConfigError("profile.smoothness must be positive");
  if (p.quad_nodes < 16 || p.quad_nodes % 16 != 0) throw ConfigError("profile.quad_nodes must be a positive multiple of 16");
  const double lo = p.center - p.width, hi = p.center + p.width;
  const double cell_lo = 0.5 * p.cell, cell_hi = 0.5 * (p.cell + 1);
  if (touches_lattice(lo, hi) || lo <= cell_lo || hi >= cell_hi) {
    throw ConfigError("half-integer avoidance condition violated: profile support [" + fmt(lo) + ", " + fmt(hi) +
                      "] must lie strictly inside the cell (" + fmt(cell_lo) + ", " + fmt(cell_hi) +
                      ") and avoid Z/2");
  }
  return ScatteringProfile(p);
}

ScatteringProfile ScatteringProfile::unchecked(const ProfileParams& p) { return ScatteringProfile(p); }

double ScatteringProfile::hat(double xi) const {
  const double z = (xi - params_.center) / params_.width;
  if (std::abs(z) >= 1.0) return 0.0;
  return params_.amplitude * std::exp(-std::pow(1.0 - z * z, -params_.smoothness));
}

std::vector<double> ScatteringProfile::hat_jet(double xi, int order) const {
  const std::size_t n = static_cast<std::size_t>(order) + 1;
  const double w = params_.width;
  const double z0 = (xi - params_.center) / w;
  if (std::abs(z0) >= 1.0) return Jet(n, 0.0);
  Jet q(n, 0.0);
  q[0] = 1.0 - z0 * z0;
  if (n > 1) q[1] = -2.0 * z0 / w;
  if (n > 2) q[2] = -1.0 / (w * w);
  Jet r = jet_pow(q, -params_.smoothness);
  for (auto& v : r) v = -v;
  Jet e = jet_exp(r);
  for (auto& v : e) v *= params_.amplitude;
  return e;
}

double ScatteringProfile::lattice_distance() const {
  const double a = lo(), b = hi();
  if (touches_lattice(a, b)) return 0.0;
  return std::min(a - std::floor(2.0 * a) / 2.0, std::ceil(2.0 * b) / 2.0 - b);
}

QuadratureRule ScatteringProfile::rule(int nodes) const {
  return gauss_legendre(lo(), hi(), static_cast<std::size_t>(std::max(1, nodes / int(kGaussOrder))));
}

void ScatteringProfile::evolve_with(int nodes, int k, double t, std::span<const double> xs,
                                    std::span<cplx> out) const {
  const QuadratureRule r = rule(nodes);
  std::vector<cplx> weighted(r.size());
  for (std::size_t q = 0; q < r.size(); ++q) {
    weighted[q] = r.weights[q] * std::pow(cplx(0.0, r.nodes[q]), k) * hat(r.nodes[q]) / (2.0 * kPi);
  }
  parallel::weighted_phase_sum(r.nodes, weighted, xs, t, out);
}

int ScatteringProfile::nodes_for(double t, double xmax) const {
  // Total phase swing of t xi^2 - x xi across the support, about 3 rad per panel.
  const double swing = std::abs(t) * std::abs(hi() * hi() - lo() * lo()) + xmax * (hi() - lo());
  const int panels = static_cast<int>(std::ceil(swing / 3.0));
  return std::max(params_.quad_nodes, panels * int(kGaussOrder));
}

void ScatteringProfile::evolve(double t, std::span<const double> xs, std::span<cplx> out, int k, int nodes,
                               bool check) const {
  if (is_zero()) {
    std::fill(out.begin(), out.end(), cplx{});
    return;
  }
  if (nodes <= 0) nodes = params_.quad_nodes;
  evolve_with(nodes, k, t, xs, out);
  if (!check || xs.empty()) return;
  const std::size_t stride = std::max<std::size_t>(1, xs.size() / 64);
  std::vector<double> sub;
  for (std::size_t i = 0; i < xs.size(); i += stride) sub.push_back(xs[i]);
  std::vector<cplx> ref(sub.size());
  evolve_with(2 * nodes, k, t, sub, ref);
  // (1/2pi) int |xi|^k |hat| bounds the modulus everywhere.
  const QuadratureRule r = rule(nodes);
  double scale = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) scale += r.weights[q] * std::pow(std::abs(r.nodes[q]), k) * std::abs(hat(r.nodes[q]));
  scale /= 2.0 * kPi;
  for (std::size_t i = 0, s = 0; i < xs.size(); i += stride, ++s) {
    if (std::abs(out[i] - ref[s]) > 1e-10 * scale) {
      throw QuadratureError("profile free evolution did not converge under node doubling at t=" + fmt(t) +
                            ", x=" + fmt(xs[i]) + "; raise profile.quad_nodes");
    }
  }
}

MeshlessField ScatteringProfile::evolved(double t, int k, int nodes) const {
  const ScatteringProfile self = *this;
  return [self, t, k, nodes](std::span<const double> xs, std::span<cplx> out) { self.evolve(t, xs, out, k, nodes); };
}

ComplexField ScatteringProfile::sample(const SpectralGrid& grid, double t, int k) const {
  ComplexField F(grid, Representation::frequency);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double xi = grid.frequency(i);
    const double h = hat(xi);
    if (h == 0.0) continue;
    F[i] = std::pow(cplx(0.0, xi), k) * h * std::polar(1.0, -t * xi * xi);
  }
  return from_fourier(F);
}

double ScatteringProfile::derivative_norm(int k) const {
  if (is_zero()) return 0.0;
  const QuadratureRule r = rule(params_.quad_nodes);
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) {
    const double h = hat(r.nodes[q]);
    s += r.weights[q] * std::pow(r.nodes[q], 2 * k) * h * h;
  }
  return std::sqrt(s / (2.0 * kPi));
}

double ShiftedProfile::hat(double xi) const {
  double v = base->hat(xi);
  if (v == 0.0) return 0.0;
  for (int s : shifts) v /= xi + 0.5 * s;
  return v;
}

AvoidanceCheck check_half_integer_avoidance(const ScatteringProfile& u, int shift, int order, int levels) {
  AvoidanceCheck out{shift, order, {}, false};
  const double lo = u.lo(), hi = u.hi();
  const double pole = -0.5 * shift;
  // Panels meet at the pole when it lies inside, so refinement probes it.
  std::vector<std::pair<double, double>> pieces;
  if (pole > lo && pole < hi) {
    pieces = {{lo, pole}, {pole, hi}};
  } else {
    pieces = {{lo, hi}};
  }
  const int base_panels = std::max(1, u.params().quad_nodes / int(kGaussOrder));
  for (int level = 0; level < levels; ++level) {
    const std::size_t panels = static_cast<std::size_t>(base_panels) << level;
    double total = 0.0;
    for (const auto& [a, b] : pieces) {
      const QuadratureRule r = gauss_legendre(a, b, panels);
      for (std::size_t q = 0; q < r.size(); ++q) {
        const double xi = r.nodes[q];
        Jet den(static_cast<std::size_t>(order) + 1, 0.0);
        den[0] = xi + 0.5 * shift;
        if (order >= 1) den[1] = 1.0;
        const Jet f = jet_div(u.hat_jet(xi, order), den);
        double fact = 1.0, acc = 0.0;
        for (int j = 0; j <= order; ++j) {
          if (j > 0) fact *= j;
          const double d = fact * f[static_cast<std::size_t>(j)];
          acc += d * d;
        }
        total += r.weights[q] * acc;
      }
    }
    out.refinements.push_back(std::sqrt(total));
  }
  const double a = out.refinements[out.refinements.size() - 2], b = out.refinements.back();
  out.stable = std::isfinite(b) && std::abs(b - a) <= 1e-8 * std::max(std::abs(b), 1e-300);
  return out;
}

MeshlessField v1_assemble(const DiracTrain& train, const ScatteringProfile& u, double t) {
  MeshlessField a = dirac_wave(train, t);
  MeshlessField f = u.evolved(t);
  return [a, f](std::span<const double> xs, std::span<cplx> out) {
    std::vector<cplx> tmp(xs.size());
    a(xs, out);
    f(xs, tmp);
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] += tmp[i];
  };
}

ComplexField sample_v1(const DiracTrain& train, const ScatteringProfile& u, double t, const SpectralGrid& grid) {
  return sample_dirac_wave(train, t, grid) + u.sample(grid, t);
}

std::vector<ModeTrace> extract_modes(std::span<const double> times, std::span<const ComplexField> fields,
                                     const DiracTrain& train) {
  if (times.size() != fields.size()) throw ConfigError("extract_modes: times and fields differ in length");
  std::vector<ModeTrace> traces;
  for (const auto& [j, a] : train.alphas) traces.push_back({j, {}, {}, {}});
  for (std::size_t s = 0; s < times.size(); ++s) {
    const ComplexField F = as_frequency(fields[s]);
    const auto& g = F.grid();
    const double t = times[s];
    for (auto& tr : traces) {
      const auto slot = g.half_integer_slot(tr.j);
      if (!slot) throw ConfigError("extract_modes: mode j=" + std::to_string(tr.j) + " is not an exact grid mode");
      const double jj = static_cast<double>(tr.j) * tr.j;
      const cplx A = std::polar(1.0, t * jj / 4.0) * F[*slot] / g.length();
      const cplx rbar = std::polar(1.0, -train.theta(tr.j, t)) * A - std::conj(train.alphas.at(tr.j));
      tr.times.push_back(t);
      tr.amplitude.push_back(A);
      tr.remainder.push_back(std::conj(rbar));
    }
  }
  return traces;
}

}  // namespace nlslab
