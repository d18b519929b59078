#pragma once

#include <optional>
#include <span>
#include <utility>

#include "nlslab/grid.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

/// Pseudo-conformal transform at time t:
///   T(f)(t, x) = e^{ix^2/4t} t^{-1/2} conj(f(1/t, x/t)),
/// with f given at time 1/t by a point evaluator and sampled on `outer`.
/// When `reliable` is set, inner points x/t outside it raise ConfigError.
ComplexField pseudo_conformal(const MeshlessField& f_at_inverse_time, double t, const SpectralGrid& outer,
                              std::optional<std::pair<double, double>> reliable = std::nullopt);

/// Grid form: f sampled on grid G at time 1/t maps to the grid of length
/// t * L(G) whose points are x_i = t * y_i, so no resampling is needed.
ComplexField pseudo_conformal_scaled(const ComplexField& f, double t);

/// Trigonometric interpolation f(x) = (1/L) sum_k F_k e^{i xi_k x} at arbitrary points.
std::vector<cplx> interpolate(const ComplexField& f, std::span<const double> xs);
MeshlessField interpolant(const ComplexField& f);

/// J f = (x/2) f + i t d_x f, d_x spectral.
ComplexField j_operator(const ComplexField& f, double t);

/// J^k f = e^{ix^2/4t} (i t d_x)^k (e^{-ix^2/4t} f). Exact on grids where the
/// dechirped field is periodic (outputs of pseudo_conformal_scaled).
ComplexField j_power_dechirped(const ComplexField& f, double t, int k);

/// f * e^{i direction rate M ln t}; rate = 2 is the renormalisation as usually
/// written, rate = sigma matches the equation integrated here.
ComplexField wick_phase(const ComplexField& f, double t, double M, int direction, double rate = 2.0);

/// || d^k T(f) - T((-i)^k J^k f) ||_2 for f on a grid at time 1/t, with J at time 1/t.
double commutation_defect(const ComplexField& f, double t, int k);

struct LimitDefect {
  double t;
  int k;
  double defect;          // against (-ix/2)^k conj(hat u_+(x/2)) e^{i pi/4} / sqrt(4 pi)
  double defect_real_k;   // against (x/2)^k conj(hat u_+(x/2)) e^{i pi/4} / sqrt(4 pi)
  double limit_norm;      // L^2 norm of the limit object
};

/// Distance between T(e^{is d_xx} d^k u_+) at time t (so s = 1/t) and its t -> 0
/// limit, on the outer grid, with the free evolution evaluated meshlessly.
LimitDefect small_time_limit_defect(const ScatteringProfile& u, double t, int k, const SpectralGrid& outer);

/// Same quantity through the scaled-grid route: e^{is d_xx} d^k u_+ sampled
/// spectrally on `inner` (which must hold it without wraparound).
LimitDefect small_time_limit_defect_spectral(const ScatteringProfile& u, double t, int k, const SpectralGrid& inner);

}  // namespace nlslab
