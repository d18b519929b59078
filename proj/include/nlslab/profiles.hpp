#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nlslab/grid.hpp"
#include "nlslab/quadrature.hpp"

namespace nlslab {

/// Point evaluator: fills out[i] with the field at xs[i].
using MeshlessField = std::function<void(std::span<const double> xs, std::span<cplx> out)>;

ComplexField sample(const MeshlessField& f, const SpectralGrid& grid);
std::vector<cplx> evaluate(const MeshlessField& f, std::span<const double> xs);

/// Log-phase law of the train modes:
///   theta_j(t) = kappa * sigma * (self |alpha_j|^2 + mass M + offset) ln t.
/// The default is the law forced by the resonant part of the cubic term for
/// any finite train. `textbook()` is the (|alpha_j|^2 - 2M)/2 form, which
/// agrees with the default only for a single mode.
struct PhaseLaw {
  double kappa = 0.5;
  double self = -1.0;
  double mass = 0.0;
  double offset = 0.0;

  static PhaseLaw textbook() { return {0.5, 1.0, -2.0, 0.0}; }

  double rate(double a2, double M, int sigma) const { return kappa * sigma * (self * a2 + mass * M + offset); }
};

struct DiracTrain {
  std::map<int, cplx> alphas;
  double q = 2.0;
  int sign = 1;
  PhaseLaw law{};

  double mass() const;
  /// ||alpha||_{l^{2,q}} = (sum (1+|j|)^{2q} |alpha_j|^2)^{1/2}.
  double weighted_norm() const;
  double theta(int j, double t) const;
  bool empty() const;
};

/// Measured remainders R_j at one time (keyed by mode index).
using ModeRemainders = std::map<int, cplx>;

/// Coefficient c_j(t) of e^{ixj/2} in A(t, x):
///   c_j = e^{i theta_j(t)} (conj(alpha_j) + conj(R_j)) e^{-itj^2/4}.
std::map<int, cplx> dirac_coefficients(const DiracTrain& train, double t, const ModeRemainders* R = nullptr);

MeshlessField dirac_wave(const DiracTrain& train, double t, const ModeRemainders* R = nullptr);

/// A(t, .) on a standard box grid, exact (a trigonometric polynomial).
/// Throws ConfigError when a mode is not an exact grid mode.
ComplexField sample_dirac_wave(const DiracTrain& train, double t, const SpectralGrid& grid,
                               const ModeRemainders* R = nullptr);

/// Closed forms for a single Dirac mass:
///   u(t,x)   = alpha e^{-i lambda |alpha|^2 ln t} e^{ix^2/4t} / sqrt(t),
///   psi(t,x) = alpha e^{ix^2/4t} / sqrt(t).
struct SingleDirac {
  cplx alpha;
  double lambda;
  MeshlessField u(double t) const;
  MeshlessField psi(double t) const;
};

/// The lambda matching the train's equation for a single mode of weight
/// |alpha|^2 (so that u solves the unrenormalised cubic equation).
double single_dirac_lambda(const PhaseLaw& law, int sigma);

SingleDirac single_dirac_closed_forms(cplx alpha, double lambda);

struct ProfileParams {
  int cell = 0;
  double center = 0.25;
  double width = 0.22;
  double amplitude = 4.0;
  double smoothness = 1.0;
  int quad_nodes = 512;
};

/// u_+ given by a smooth bump in frequency,
///   hat u_+(xi) = amplitude * exp(-1/(1 - z^2)^smoothness),  z = (xi - center)/width,
/// supported in [center - width, center + width] inside one half-integer cell.
class ScatteringProfile {
 public:
  /// Validates the half-integer avoidance condition.
  static ScatteringProfile make(const ProfileParams& params);
  /// No validation; used to exhibit profiles that violate the condition.
  static ScatteringProfile unchecked(const ProfileParams& params);

  const ProfileParams& params() const { return params_; }
  double lo() const { return params_.center - params_.width; }
  double hi() const { return params_.center + params_.width; }
  bool is_zero() const { return params_.amplitude == 0.0; }

  double hat(double xi) const;
  /// Taylor coefficients hat^{(j)}(xi)/j! for j = 0..order.
  std::vector<double> hat_jet(double xi, int order) const;

  /// Distance from the support to the half-integer lattice Z/2.
  double lattice_distance() const;

  QuadratureRule rule(int nodes) const;

  /// (1/2pi) int (i xi)^k hat(xi) e^{-it xi^2 + i x xi} dxi at arbitrary x, i.e.
  /// e^{it d_xx} d^k u_+ with no box. `nodes` = 0 uses params().quad_nodes.
  /// Checked against twice the nodes on a subset of the points
  /// (QuadratureError when they differ by more than 1e-10 relative).
  void evolve(double t, std::span<const double> xs, std::span<cplx> out, int k = 0, int nodes = 0,
              bool check = true) const;
  MeshlessField evolved(double t, int k = 0, int nodes = 0) const;

  /// Node count resolving the phase t xi^2 - x xi for |x| <= xmax.
  int nodes_for(double t, double xmax) const;

  /// Spectral sample of e^{it d_xx} d^k u_+ on a grid (periodisation of the line field).
  ComplexField sample(const SpectralGrid& grid, double t, int k = 0) const;

  /// Line norms from the frequency side: ||d^k u_+||_2 = ((1/2pi) int xi^{2k} |hat|^2)^{1/2}.
  double derivative_norm(int k) const;
  double l2_norm() const { return derivative_norm(0); }

 private:
  explicit ScatteringProfile(const ProfileParams& p) : params_(p) {}
  void evolve_with(int nodes, int k, double t, std::span<const double> xs, std::span<cplx> out) const;
  ProfileParams params_;
};

/// hat u_+(xi) / prod_s (xi + s/2): the profile divided by lattice shifts.
struct ShiftedProfile {
  const ScatteringProfile* base;
  std::vector<int> shifts;
  double hat(double xi) const;
};

/// Result of the half-integer avoidance check for one shift p:
/// H^k norm (in xi) of hat u_+(xi)/(xi + p/2) under nested refinement.
struct AvoidanceCheck {
  int shift;
  int order;
  std::vector<double> refinements;  // norm at 2^r * base nodes
  bool stable;
};

AvoidanceCheck check_half_integer_avoidance(const ScatteringProfile& u, int shift, int order, int levels = 5);

/// v_1 = A + e^{it d_xx} u_+.
MeshlessField v1_assemble(const DiracTrain& train, const ScatteringProfile& u, double t);
ComplexField sample_v1(const DiracTrain& train, const ScatteringProfile& u, double t, const SpectralGrid& grid);

struct ModeTrace {
  int j;
  std::vector<double> times;
  std::vector<cplx> amplitude;  // A_j(t)
  std::vector<cplx> remainder;  // R_j(1/t)
};

/// A_j(t) = e^{itj^2/4} (1/L) int v e^{-ixj/2} dx and
/// conj(R_j(1/t)) = e^{-i theta_j(t)} A_j(t) - conj(alpha_j), for each train mode.
std::vector<ModeTrace> extract_modes(std::span<const double> times, std::span<const ComplexField> fields,
                                     const DiracTrain& train);

}  // namespace nlslab
