#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nlslab/duhamel.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

/// Least-squares power law value ~ constant * t^exponent.
struct DecayFit {
  double exponent = 0.0;
  double constant = 0.0;      // prefactor, not its log
  double rms_residual = 0.0;  // of ln value about the fitted line
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t samples = 0;
};

inline constexpr std::size_t kMinFitSamples = 8;

/// Fits ln value against ln t over the samples with t in `window` (all when
/// unset). Needs >= 8 samples spanning at least one decade and positive values.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values,
                   std::optional<std::pair<double, double>> window = std::nullopt);

struct DispersionMargin {
  double t;
  double sup;           // max |e^{it d_xx} u_+| over the window
  double argmax;        // where it is attained
  double l1;            // ||u_+||_1
  double sharp_bound;   // l1 / sqrt(4 pi t)
  double loose_bound;   // l1 / sqrt(t)
  double sharp_margin;  // sharp_bound - sup
  double loose_margin;
};

/// ||u_+||_1 by meshless evaluation and trapezoid on [-half_width, half_width].
double profile_l1_norm(const ScatteringProfile& u, double half_width = 400.0, double spacing = 0.02);

/// Dispersion margins. The window covers the classical region 2t supp(hat u)
/// plus `pad` on both sides; a maximum within 1% of an edge throws ConfigError.
std::vector<DispersionMargin> check_dispersion(const ScatteringProfile& u, std::span<const double> times,
                                               double pad = 60.0, double spacing = 0.02);

struct GnMargin {
  double sup_sq;   // ||f||_inf^2
  double product;  // ||f||_2 ||f'||_2
  double margin;   // product - sup_sq
};

/// ||f||_2 ||f'||_2 - ||f||_inf^2 per field. Fields must carry negligible
/// boundary mass (BoundaryMassError otherwise).
std::vector<GnMargin> check_gn(std::span<const ComplexField> fields);

struct DecayReportRow {
  int k;
  std::vector<double> times;
  std::vector<double> values;
  DecayFit fit;
  bool exact_match = false;  // every value zero: no fit
};

/// NLS side: ||d^k (v - v1)(t)||_2 fitted over `window`.
std::vector<DecayReportRow> nls_decay_report(const FieldFamily& v, const FieldFamily& v1, int k_max,
                                             std::optional<std::pair<double, double>> window);

/// Transformed side: with s = 1/t, psi - psi_1 = Wick-phased T(v - v1) at time s
/// on the scaled grid, measured as ||J^k (psi - psi_1)(s)||_2 and fitted against s.
std::vector<DecayReportRow> transformed_decay_report(const FieldFamily& v, const FieldFamily& v1, double M,
                                                     int sigma, int k_max,
                                                     std::optional<std::pair<double, double>> t_window);

}  // namespace nlslab
