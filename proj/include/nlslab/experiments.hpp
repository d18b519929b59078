#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nlslab/analysis.hpp"
#include "nlslab/config.hpp"
#include "nlslab/duhamel.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/transforms.hpp"

namespace nlslab {

// ---- random test fields -------------------------------------------------

/// Random Fourier coefficients on |xi| <= band (complex Gaussian), physical.
ComplexField random_band_limited(const SpectralGrid& grid, std::mt19937_64& rng, double band);

/// Sum of three Gaussian wave packets well inside the box (negligible boundary
/// mass, effectively band-limited). With mean_zero the field is the derivative
/// of such a sum, so its integral vanishes.
ComplexField random_packet_field(const SpectralGrid& grid, std::mt19937_64& rng, bool mean_zero);

/// Five bump profiles in different half-integer cells and shapes.
std::vector<ProfileParams> canonical_profiles();

/// Fit window [t0, hi] with hi = max(t_last / 8, 10 rho t0), capped at t_last.
std::pair<double, double> decay_window(double t0, double t_last, double rho);

// ---- invariant suites ---------------------------------------------------

struct Check {
  std::string name;
  double value;
  double tolerance;
  bool pass;  // value <= tolerance
};

/// Unitarity, group law, Plancherel, derivative/propagator commutation on
/// `fields` random band-limited fields (n = 4096, m = 4); worst relative error each.
std::vector<Check> spectral_invariants(std::mt19937_64& rng, int fields);

/// Involution and isometry (relative) and commutation defects k = 1..k_max on
/// random packets at every configured time; worst value each.
std::vector<Check> transform_invariants(const ExperimentConfig& cfg, std::mt19937_64& rng);

// ---- experiments --------------------------------------------------------

struct RemainderFit {
  int j;
  double r_at_t0;   // |R_j(1/t0)|
  double max_abs;   // max_t |R_j(1/t)|
  bool fitted;      // false when the drift is identically zero
  DecayFit drift;   // |R_j(1/t) - R_j(1/t_end)| ~ C t^{-gamma}, gamma = -exponent
};

struct EvolveOutcome {
  SolverRun run;
  FieldFamily v1;
  std::vector<ModeTrace> modes;
  std::vector<RemainderFit> remainder_fits;
  std::vector<DecayReportRow> diff;  // ||d^k (v - v1)||, k <= picard.s
  std::vector<double> residuals;     // NaN at the two ends
};
EvolveOutcome run_evolve(const ExperimentConfig& cfg);

struct IbpRow {
  SourceTag tag;
  double t;
  double direct_norm;
  double ibp_norm;
  double boundary_norm;
  double remainder_norm;
  double rel_diff;
};

struct SourcesOutcome {
  SourceSeries series;
  std::map<SourceTag, std::vector<std::vector<double>>> norms;  // [k][time]
  std::map<SourceTag, std::vector<DecayFit>> fits;              // per k
  std::vector<IbpRow> ibp;
};
SourcesOutcome run_sources(const ExperimentConfig& cfg);

struct PicardOutcome {
  PicardResult result;
  std::vector<DecayReportRow> nls;
  std::vector<DecayReportRow> transformed;
  std::pair<double, double> window;
};
/// Rejects trains above picard.alpha_max and t0 below picard.t0_min.
PicardOutcome run_picard(const ExperimentConfig& cfg);

struct CommutationRow {
  int field;
  double t;
  int k;
  double defect;
};
struct IdentityRow {
  int field;
  double t;
  double involution;  // relative
  double isometry;    // relative
};
struct LimitRow {
  std::string set;  // "fine" or "reference"
  LimitDefect d;
};
struct SlopeRow {
  std::string set;
  int k;
  double slope;  // least-squares slope of ln defect against ln t
  double ratio_spread;  // max/min of defect/t over the set
};
struct TransformsOutcome {
  std::vector<CommutationRow> commutation;
  std::vector<IdentityRow> identities;
  std::vector<LimitRow> limit;
  std::vector<SlopeRow> slopes;
};
TransformsOutcome run_transforms(const ExperimentConfig& cfg);

struct InequalitiesOutcome {
  std::vector<std::pair<int, DispersionMargin>> dispersion;  // (profile index, margin)
  std::vector<GnMargin> gn;
};
InequalitiesOutcome run_inequalities(const ExperimentConfig& cfg);

// ---- CLI driver ---------------------------------------------------------

struct RunOptions {
  std::string out_dir;  // empty: cfg.output
  bool dump = false;
  std::optional<int> panels;
  bool quiet = false;
};

const std::vector<std::string>& subcommand_names();

/// Runs one subcommand, writing CSVs and manifest.json under <out>/<name>/.
/// Returns 0, or 3 when selftest finds a violated invariant; errors propagate.
int run_subcommand(const std::string& name, ExperimentConfig cfg, const RunOptions& opts);

}  // namespace nlslab
