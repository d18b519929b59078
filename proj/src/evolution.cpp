#include "nlslab/evolution.hpp"

#include <cmath>
#include <cstdio>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/kernels.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

void require_finite(const ComplexField& v, double t) {
  if (!v.all_finite()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "solver produced NaN/Inf at t=%.6g", t);
    throw NumericalError(buf);
  }
}

std::vector<cplx> kinetic_multiplier(const SpectralGrid& g, double h) {
  std::vector<cplx> mult(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = g.frequency(k);
    mult[k] = std::polar(1.0, -h * xi * xi);
  }
  return mult;
}

// Free flow applied in place to physical samples. The box-phase and dx
// scalings of to_fourier cancel between the two transforms, so the raw DFT
// pair with a 1/n factor folded into the multiplier suffices.
void apply_kinetic(std::vector<cplx>& buf, const std::vector<cplx>& mult) {
  const std::size_t n = buf.size();
  fft::forward(buf.data(), buf.data(), n);
  for (std::size_t k = 0; k < n; ++k) buf[k] *= mult[k];
  fft::backward(buf.data(), buf.data(), n);
}

std::vector<cplx> scaled(std::vector<cplx> mult) {
  const double inv_n = 1.0 / static_cast<double>(mult.size());
  for (auto& m : mult) m *= inv_n;
  return mult;
}

}  // namespace

std::vector<double> geometric_lattice(double t0, double t_end, double rho) {
  if (!(t0 > 0.0)) throw ConfigError("times.t0 must be positive");
  if (!(t_end > t0)) throw ConfigError("times.t_end must exceed times.t0");
  if (!(rho > 1.0)) throw ConfigError("times.rho must exceed 1");
  std::vector<double> ts;
  for (int i = 0;; ++i) {
    const double t = t0 * std::pow(rho, i);
    if (t > t_end * (1.0 + 1e-12)) break;
    ts.push_back(t);
  }
  if (ts.back() < t_end * (1.0 - 1e-12)) ts.push_back(t_end);
  return ts;
}

ComplexField strang_step(const ComplexField& v, double t, double h, double M, int sigma) {
  if (!(t > 0.0) || !(t + h > 0.0)) throw ConfigError("strang_step needs t > 0 and t + h > 0");
  ComplexField w = free_propagate(as_physical(v), 0.5 * h);
  parallel::nonlinear_phase(w.values(), 0.5 * sigma * (std::log(t + h) - std::log(t)), M);
  w = free_propagate(w, 0.5 * h);
  require_finite(w, t + h);
  return w;
}

SolverRun evolve(const ComplexField& initial, const std::vector<double>& times, double M, int sigma,
                 const EvolveOptions& opts) {
  if (times.empty()) throw ConfigError("evolve needs at least one time");
  if (!(opts.h_max > 0.0)) throw ConfigError("evolve needs h_max > 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1]))) {
      throw ConfigError("snapshot times must be positive and strictly increasing");
    }
  }
  SolverRun run;
  run.sigma = sigma;
  run.M = M;
  const ComplexField start = as_physical(initial);
  const SpectralGrid& g = start.grid();
  require_finite(start, times.front());
  if (opts.monitor) require_boundary_mass(start, "evolve (initial data)", opts.monitor_threshold);
  run.times.push_back(times.front());
  run.fields.push_back(start);
  run.substeps.push_back(0);

  std::vector<cplx> buf(start.values().begin(), start.values().end());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double a = times[i - 1], b = times[i];
    const int steps = static_cast<int>(std::ceil((b - a) / opts.h_max - 1e-12));
    const double h = (b - a) / steps;
    const auto half = scaled(kinetic_multiplier(g, 0.5 * h));
    const auto full = scaled(kinetic_multiplier(g, h));
    // Fused Strang: K(h/2) N K(h) N ... N K(h/2).
    apply_kinetic(buf, half);
    for (int s = 0; s < steps; ++s) {
      const double t = a + h * s;
      const double tn = s + 1 == steps ? b : a + h * (s + 1);
      parallel::nonlinear_phase(buf, 0.5 * sigma * (std::log(tn) - std::log(t)), M);
      apply_kinetic(buf, s + 1 == steps ? half : full);
    }
    ComplexField snap(g, buf, Representation::physical);
    require_finite(snap, b);
    if (opts.monitor) require_boundary_mass(snap, "evolve", opts.monitor_threshold);
    run.times.push_back(b);
    run.fields.push_back(std::move(snap));
    run.substeps.push_back(steps);
  }
  return run;
}

double nls_residual(const SolverRun& run, std::size_t i) {
  if (i == 0 || i + 1 >= run.times.size()) throw ConfigError("nls_residual needs an interior snapshot");
  const double t = run.times[i];
  const double h1 = t - run.times[i - 1], h2 = run.times[i + 1] - t;
  const double cm = -h2 / (h1 * (h1 + h2)), c0 = (h2 - h1) / (h1 * h2), cp = h1 / (h2 * (h1 + h2));
  const ComplexField& vm = run.fields[i - 1];
  const ComplexField& v = run.fields[i];
  const ComplexField& vp = run.fields[i + 1];
  const ComplexField vxx = spatial_derivative(v, 2);
  ComplexField r(v.grid(), Representation::physical);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const cplx vt = cm * vm[k] + c0 * v[k] + cp * vp[k];
    r[k] = cplx(0.0, 1.0) * vt + vxx[k] + (run.sigma / (2.0 * t)) * (std::norm(v[k]) - 2.0 * run.M) * v[k];
  }
  return l2_norm(r);
}

}  // namespace nlslab
