#pragma once

#include <vector>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Snapshots t_i = t0 rho^i up to t_end (t_end appended when off-lattice).
std::vector<double> geometric_lattice(double t0, double t_end, double rho);

/// One Strang step of  i v_t + v_xx + (sigma/2t)(|v|^2 - 2M) v = 0  from t to t + h:
/// half free flow, exact nonlinear phase over [t, t+h], half free flow.
/// h may be negative (backward step) as long as t + h > 0.
ComplexField strang_step(const ComplexField& v, double t, double h, double M, int sigma);

struct EvolveOptions {
  double h_max = 0.05;       // largest sub-step
  bool monitor = true;       // boundary-mass monitor at each snapshot
  double monitor_threshold = 1e-6;
};

struct SolverRun {
  std::vector<double> times;
  std::vector<ComplexField> fields;
  std::vector<int> substeps;  // per interval [t_{i-1}, t_i]; substeps[0] = 0
  int sigma = 1;
  double M = 0.0;
};

/// Integrates from `initial` at times.front() through every time in `times`
/// (strictly increasing, all > 0), storing one snapshot per time.
SolverRun evolve(const ComplexField& initial, const std::vector<double>& times, double M, int sigma,
                 const EvolveOptions& opts = {});

/// || i v_t + v_xx + (sigma/2t)(|v|^2 - 2M) v ||_2 at an interior snapshot, with
/// v_t from the three-point centred difference on the (possibly uneven) lattice.
double nls_residual(const SolverRun& run, std::size_t index);

}  // namespace nlslab
