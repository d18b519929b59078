#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nlslab/duhamel.hpp"
#include "nlslab/profiles.hpp"

namespace nlslab {

struct ModeEntry {
  int j;
  double re;
  double im;
};

/// Every experiment parameter, with defaults. The canonical text form is JSON
/// with sorted keys and two-space indent; see README for the schema.
struct ExperimentConfig {
  struct Grid {
    std::size_t n = 16384;
    int m = 1024;
  } grid;
  struct Train {
    std::vector<ModeEntry> alphas;  // defaults set in the constructor
    double q = 2.0;
    int sign = 1;
    PhaseLaw law{};
  } train;
  ProfileParams profile{};
  struct Times {
    double t0 = 20.0;
    double t_end = 2000.0;
    double rho = 1.0905077326652577;  // 2^(1/8)
  } times;
  struct Evolve {
    double h_max = 0.05;
  } evolve;
  struct Picard {
    double mu = 0.4;
    int s = 1;
    double delta = 0.05;
    int max_iter = 15;
    double tol = 1e-8;
    double T_max_factor = 100.0;
    int panels_per_decade = 4;
    double i_refine_tol = 0.05;
    bool include_train_remainder = true;
    bool check_sources = true;
    double alpha_max = 0.1;  // largest accepted ||alpha||_{l^{2,q}}
    double t0_min = 10.0;    // smallest accepted t0
  } picard;
  struct Sources {
    std::size_t n = 16384;
    int m = 2048;
    double t_start = 40.0;
    double t_stop = 400.0;
    int samples = 17;
    double T_max = 6000.0;
    std::vector<std::string> terms{"Ja", "Jc", "Jd", "Je"};
  } sources;
  struct Transforms {
    std::vector<double> commutation_times{0.5, 1.0, 2.0, 5.0};
    int random_fields = 20;
    int k_max = 2;
    std::size_t inner_n = 2048;
    int inner_m = 4;
    std::vector<double> limit_times{1.6e-3, 8e-4, 4e-4, 2e-4};
    std::vector<double> limit_times_reference{0.2, 0.1, 0.05, 0.025};
    std::size_t outer_n = 1024;
    int outer_m = 1;
  } transforms;
  struct Inequalities {
    std::vector<double> dispersion_times{1.0, 10.0, 100.0};
    int gn_fields = 100;
  } inequalities;
  std::uint64_t seed = 20240601;
  std::string output = "nlslab_out";

  ExperimentConfig();

  DiracTrain dirac_train() const;
  std::vector<SourceTag> source_tags() const;
};

/// Parses and validates; unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text (sorted keys, 2-space indent, trailing newline).
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace nlslab
