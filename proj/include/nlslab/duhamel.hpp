#pragma once

#include <map>
#include <string>
#include <vector>

#include "nlslab/grid.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

/// Source terms of the fixed-point map, each of the form
///   J(t) = -i int_t^{T_max} e^{i(t - tau) d_xx} (sigma / 2 tau) F(tau) dtau
/// with A = train wave (R = 0), A_R = train wave with measured R, U = e^{i tau d_xx} u_+:
///   Ja: F = 2(|A|^2 - M) U                 (cross terms p != j of |A|^2)
///   Jb: F = 2(|A_R|^2 - |A|^2) U           (zero unless traces are supplied)
///   Jc: F = A^2 conj(U)
///   Jd: F = 2A|U|^2 + conj(A) U^2
///   Je: F = |U|^2 U
///   Jn: F = non-resonant part of (|A|^2 - 2M) A, the train's own interaction
///       that its log phases do not absorb.
enum class SourceTag { Ja, Jb, Jc, Jd, Je, Jn };

std::string to_string(SourceTag tag);
SourceTag parse_source_tag(const std::string& name);
const std::vector<SourceTag>& all_source_tags();

struct SourceSpec {
  DiracTrain train;
  ScatteringProfile profile;
  double T_max = 0.0;
  int panels_per_decade = 4;
  const std::vector<ModeTrace>* traces = nullptr;  // measured R_j for Jb
};

struct SourceSeries {
  std::vector<double> times;
  std::map<SourceTag, std::vector<ComplexField>> terms;  // physical, one per time
  std::map<SourceTag, double> tail_estimate;              // ||int_{T_max}^inf ...|| estimate
  std::size_t nodes = 0;                                   // quadrature nodes used
};

/// All requested source terms at every time in `times` (ascending, each
/// <= T_max), by one cumulative pass of composite Gauss-Legendre from T_max
/// downward. Sub-panels are at most 4 pi / P long with at least P per decade.
SourceSeries compute_source_terms(const SourceSpec& spec, const std::vector<double>& times, const SpectralGrid& grid,
                                  const std::vector<SourceTag>& tags);

/// As above, then repeats with doubled panels and throws QuadratureError when
/// any term moves by more than `rtol` relative. Returns the finer result.
SourceSeries compute_source_terms_checked(const SourceSpec& spec, const std::vector<double>& times,
                                          const SpectralGrid& grid, const std::vector<SourceTag>& tags,
                                          double rtol = 1e-6);

ComplexField source_term(const SourceSpec& spec, SourceTag tag, double t, const SpectralGrid& grid);

/// Integration-by-parts form of Ja or Jc (R = 0), evaluated per frequency:
/// boundary terms at t and T_max in closed form, plus the remainder integral
/// of the differentiated amplitude (i Lambda - 1) tau^{i Lambda - 2} by quadrature.
struct IbpParts {
  ComplexField boundary;
  ComplexField remainder;
  ComplexField total;
};
IbpParts source_term_ibp(const SourceSpec& spec, SourceTag tag, double t, const SpectralGrid& grid);

struct FieldFamily {
  std::vector<double> times;
  std::vector<ComplexField> fields;

  std::size_t size() const { return times.size(); }
};

FieldFamily sample_v1_family(const DiracTrain& train, const ScatteringProfile& u, const std::vector<double>& times,
                             const SpectralGrid& grid);

FieldFamily difference(const FieldFamily& a, const FieldFamily& b);

struct IResult {
  std::vector<ComplexField> values;  // I(v)(t_i), physical
  /// Per time, ||fine - coarse|| between the trapezoid on the full lattice and
  /// on every other node (NaN where the coarse rule has no node).
  std::vector<double> refinement_gap;
};

/// I(v)(t_i) = -i int_{t_i}^{T} e^{i(t_i - tau) d_xx} (sigma/2 tau)[N(v) - N(v1)] dtau,
/// N(f) = (|f|^2 - 2M) f, trapezoid in ln tau on the family's lattice (T = last time).
IResult functional_I(const FieldFamily& v, const FieldFamily& v1, double M, int sigma);

struct SNormWeights {
  double mu = 0.4;
  int s = 1;
};

/// sum_{k<=s} sup_i t_i^mu ||d^k f(t_i)||_2.
double s_norm(const FieldFamily& f, const SNormWeights& w);

struct PicardOptions {
  SNormWeights weights{};
  double delta = 0.05;
  int max_iter = 15;
  double tol = 1e-8;
  /// Largest accepted ||I_fine - I_coarse|| as a fraction of ||phi(v) - v1|| per time.
  double i_refine_tol = 0.05;
  bool check_sources = true;
  bool include_train_remainder = true;  // Jn
};

struct PicardIteration {
  int iter;
  double update_S_norm;      // ||v^{n} - v^{n-1}||_S
  double contraction_ratio;  // update_n / update_{n-1}; NaN for the first
  double tail_bound;
  double distance_S;         // ||v^{n} - v1||_S
  double i_refinement_gap;   // worst relative trapezoid gap of I
};

struct PicardResult {
  FieldFamily v;
  FieldFamily v1;
  SourceSeries sources;
  std::vector<PicardIteration> iterations;
  bool converged = false;
};

struct PicardProblem {
  DiracTrain train;
  ScatteringProfile profile;
  SpectralGrid grid;
  std::vector<double> times;  // lattice ending at T_max
  int panels_per_decade = 4;
};

/// phi(v)(t_i) = v1(t_i) + I(v)(t_i) + sum of source terms (precomputed).
FieldFamily phi_apply(const FieldFamily& v, const FieldFamily& v1, const std::vector<ComplexField>& source_sum,
                      double M, int sigma, IResult* i_out = nullptr);

/// v^{n+1} = phi(v^n) from v^0 = v1 until the S-norm update drops below tol.
PicardResult picard_solve(const PicardProblem& problem, const PicardOptions& opts);

}  // namespace nlslab
