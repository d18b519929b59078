#include "nlslab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/spectral.hpp"
#include "nlslab/threads.hpp"

#ifndef NLSLAB_VERSION
#define NLSLAB_VERSION "unknown"
#endif

namespace nlslab {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double rel(double a, double b) { return b > 0.0 ? a / b : a; }

void require_modes_on_grid(const DiracTrain& train, const SpectralGrid& g, const std::string& what) {
  for (const auto& [j, a] : train.alphas) {
    if (!g.half_integer_slot(j)) {
      throw ConfigError(what + ": Dirac mode j=" + std::to_string(j) + " exceeds the Nyquist frequency; raise n or lower m");
    }
  }
}

// Least-squares slope of ln y against ln x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

}  // namespace

ComplexField random_band_limited(const SpectralGrid& grid, std::mt19937_64& rng, double band) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexField F(grid, Representation::frequency);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (std::abs(grid.frequency(k)) > band) continue;
    const double re = gauss(rng);
    const double im = gauss(rng);
    F[k] = cplx(re, im) * grid.length();
  }
  return from_fourier(F);
}

ComplexField random_packet_field(const SpectralGrid& grid, std::mt19937_64& rng, bool mean_zero) {
  const double L = grid.length();
  std::uniform_real_distribution<double> centre(-0.15 * L, 0.15 * L);
  std::uniform_real_distribution<double> width(0.02 * L, 0.04 * L);
  std::uniform_real_distribution<double> freq(-0.2 * grid.nyquist(), 0.2 * grid.nyquist());
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexField f(grid, Representation::physical);
  for (int p = 0; p < 3; ++p) {
    const double c = centre(rng);
    const double w = std::max(width(rng), 13.0 / grid.nyquist());
    const double xi = freq(rng);
    const double re = gauss(rng);
    const double im = gauss(rng);
    const cplx a(re, im);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double y = grid.x(i) - c;
      const cplx packet = a * std::exp(-y * y / (2.0 * w * w)) * std::polar(1.0, xi * grid.x(i));
      f[i] += mean_zero ? (cplx(-y / (w * w), xi) * packet) : packet;
    }
  }
  return f;
}

std::vector<ProfileParams> canonical_profiles() {
  return {
      {0, 0.25, 0.22, 4.0, 1.0, 512},
      {0, 0.30, 0.10, 1.0, 1.0, 512},
      {1, 0.75, 0.20, 2.0, 1.0, 512},
      {-1, -0.25, 0.20, 3.0, 2.0, 512},
      {2, 1.20, 0.15, 0.5, 0.5, 512},
  };
}

std::pair<double, double> decay_window(double t0, double t_last, double rho) {
  const double hi = std::min(t_last, std::max(t_last / 8.0, 10.0 * rho * t0));
  return {t0, hi};
}

std::vector<Check> spectral_invariants(std::mt19937_64& rng, int fields) {
  const SpectralGrid g = make_grid(4096, 4);
  const double times[] = {0.1, 1.0, 10.0, 100.0};
  double unitarity = 0, group = 0, plancherel = 0, commute = 0;
  for (int f = 0; f < fields; ++f) {
    const ComplexField u = random_band_limited(g, rng, 2.0);
    const double nu = l2_norm(u);
    plancherel = std::max(plancherel, std::abs(l2_norm(to_fourier(u)) - nu) / nu);
    for (double t : times) {
      const ComplexField p = free_propagate(u, t);
      unitarity = std::max(unitarity, std::abs(l2_norm(p) - nu) / nu);
      const ComplexField twice = free_propagate(free_propagate(u, t), 0.5 * t);
      group = std::max(group, l2_norm(twice - free_propagate(u, 1.5 * t)) / nu);
      // In frequency space, so roundoff from a physical round trip is not
      // amplified by the derivative symbol near Nyquist.
      const ComplexField uh = as_frequency(u);
      for (int k = 1; k <= 2; ++k) {
        const ComplexField a = spatial_derivative(free_propagate(uh, t), k);
        const ComplexField b = free_propagate(spatial_derivative(uh, k), t);
        commute = std::max(commute, l2_norm(a - b) / l2_norm(b));
      }
    }
  }
  return {{"propagator_unitarity", unitarity, 1e-12, unitarity <= 1e-12},
          {"propagator_group_law", group, 1e-12, group <= 1e-12},
          {"plancherel", plancherel, 1e-12, plancherel <= 1e-12},
          {"derivative_propagator_commutation", commute, 1e-12, commute <= 1e-12}};
}

std::vector<Check> transform_invariants(const ExperimentConfig& cfg, std::mt19937_64& rng) {
  const auto& tc = cfg.transforms;
  const SpectralGrid g = make_grid(tc.inner_n, tc.inner_m);
  double invol = 0, iso = 0, mesh = 0;
  std::vector<double> comm(std::size_t(tc.k_max) + 1, 0.0);
  for (int f = 0; f < tc.random_fields; ++f) {
    const ComplexField u = random_packet_field(g, rng, false);
    const double nu = l2_norm(u);
    for (double t : tc.commutation_times) {
      const ComplexField tu = pseudo_conformal_scaled(u, t);
      const ComplexField back = pseudo_conformal_scaled(tu, 1.0 / t);
      double d = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) d += std::norm(back[i] - u[i]);
      invol = std::max(invol, std::sqrt(d * g.spacing()) / nu);
      iso = std::max(iso, std::abs(l2_norm(tu) - nu) / nu);
      const ComplexField viamesh = pseudo_conformal(interpolant(u), t, tu.grid());
      mesh = std::max(mesh, l2_norm(viamesh - tu) / nu);
      for (int k = 1; k <= tc.k_max; ++k) {
        const double scale = l2_norm(spatial_derivative(tu, k));
        comm[std::size_t(k)] = std::max(comm[std::size_t(k)], commutation_defect(u, t, k) / std::max(scale, 1e-300));
      }
    }
  }
  std::vector<Check> out{{"transform_involution", invol, 1e-9, invol <= 1e-9},
                         {"transform_isometry", iso, 1e-9, iso <= 1e-9},
                         {"transform_meshless_vs_scaled", mesh, 1e-9, mesh <= 1e-9}};
  for (int k = 1; k <= tc.k_max; ++k) {
    const double tol = k == 1 ? 1e-7 : 1e-6;
    out.push_back({"commutation_defect_k" + std::to_string(k), comm[std::size_t(k)], tol, comm[std::size_t(k)] <= tol});
  }
  return out;
}

EvolveOutcome run_evolve(const ExperimentConfig& cfg) {
  const DiracTrain train = cfg.dirac_train();
  const ScatteringProfile profile = ScatteringProfile::make(cfg.profile);
  const SpectralGrid grid = make_grid(cfg.grid.n, cfg.grid.m);
  require_modes_on_grid(train, grid, "evolve");
  const auto times = geometric_lattice(cfg.times.t0, cfg.times.t_end, cfg.times.rho);
  const double M = train.mass();
  EvolveOutcome out;
  const ComplexField initial = sample_v1(train, profile, times.front(), grid);
  out.run = evolve(initial, times, M, train.sign, EvolveOptions{cfg.evolve.h_max, true, kBoundaryMassThreshold});
  out.v1 = sample_v1_family(train, profile, times, grid);
  out.modes = extract_modes(times, out.run.fields, train);

  auto window = decay_window(times.front(), times.back(), cfg.times.rho);
  for (const auto& tr : out.modes) {
    RemainderFit rf{tr.j, std::abs(tr.remainder.front()), 0.0, false, {}};
    std::vector<double> ts, vs;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      rf.max_abs = std::max(rf.max_abs, std::abs(tr.remainder[i]));
      const double drift = std::abs(tr.remainder[i] - tr.remainder.back());
      if (tr.times[i] >= window.first && tr.times[i] <= window.second && drift > 0.0) {
        ts.push_back(tr.times[i]);
        vs.push_back(drift);
      }
    }
    if (ts.size() >= kMinFitSamples && ts.back() >= 10.0 * ts.front() * (1 - 1e-12)) {
      rf.drift = fit_decay(ts, vs);
      rf.fitted = true;
    }
    out.remainder_fits.push_back(rf);
  }

  // v(t0) = v1(t0), so the difference fit starts one snapshot later.
  const FieldFamily vfam{times, out.run.fields};
  if (times.size() > 1) window.first = times[1];
  out.diff = nls_decay_report(vfam, out.v1, cfg.picard.s, window);

  out.residuals.assign(times.size(), kNaN);
  for (std::size_t i = 1; i + 1 < times.size(); ++i) out.residuals[i] = nls_residual(out.run, i);
  return out;
}

SourcesOutcome run_sources(const ExperimentConfig& cfg) {
  const auto& sc = cfg.sources;
  const DiracTrain train = cfg.dirac_train();
  const ScatteringProfile profile = ScatteringProfile::make(cfg.profile);
  const SpectralGrid grid = make_grid(sc.n, sc.m);
  require_modes_on_grid(train, grid, "sources");
  std::vector<double> times(static_cast<std::size_t>(sc.samples));
  for (int i = 0; i < sc.samples; ++i) {
    times[std::size_t(i)] = sc.t_start * std::pow(sc.t_stop / sc.t_start, double(i) / double(sc.samples - 1));
  }
  times.back() = sc.t_stop;
  SourceSpec spec{train, profile, sc.T_max, cfg.picard.panels_per_decade, nullptr};
  const auto tags = cfg.source_tags();
  SourcesOutcome out;
  out.series = compute_source_terms_checked(spec, times, grid, tags);
  for (const auto& [tag, fields] : out.series.terms) {
    auto& per_k = out.norms[tag];
    for (int k = 0; k <= cfg.picard.s; ++k) {
      std::vector<double> vals;
      for (const auto& f : fields) vals.push_back(derivative_norm(f, k));
      per_k.push_back(vals);
      if (std::all_of(vals.begin(), vals.end(), [](double v) { return v > 0.0; })) {
        out.fits[tag].push_back(fit_decay(times, vals));
      }
    }
  }
  // The IBP route uses the same (doubled) panels as the accepted direct result.
  SourceSpec fine = spec;
  fine.panels_per_decade *= 2;
  for (SourceTag tag : tags) {
    if (tag != SourceTag::Ja && tag != SourceTag::Jc) continue;
    for (std::size_t idx : {std::size_t{0}, times.size() - 1}) {
      const IbpParts parts = source_term_ibp(fine, tag, times[idx], grid);
      const ComplexField& direct = out.series.terms.at(tag)[idx];
      const double dn = l2_norm(direct);
      out.ibp.push_back({tag, times[idx], dn, l2_norm(parts.total), l2_norm(parts.boundary),
                         l2_norm(parts.remainder), rel(l2_norm(parts.total - direct), dn)});
    }
  }
  return out;
}

PicardOutcome run_picard(const ExperimentConfig& cfg) {
  const auto& pc = cfg.picard;
  const DiracTrain train = cfg.dirac_train();
  const ScatteringProfile profile = ScatteringProfile::make(cfg.profile);
  const double anorm = train.weighted_norm();
  if (anorm > pc.alpha_max * (1.0 + 1e-12)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "picard: ||alpha||_{l^{2,q}} = %.6g exceeds picard.alpha_max = %.6g", anorm,
                  pc.alpha_max);
    throw ConfigError(buf);
  }
  if (cfg.times.t0 < pc.t0_min) throw ConfigError("picard: times.t0 is below picard.t0_min");
  const SpectralGrid grid = make_grid(cfg.grid.n, cfg.grid.m);
  require_modes_on_grid(train, grid, "picard");
  const double T_max = pc.T_max_factor * cfg.times.t0;
  const auto times = geometric_lattice(cfg.times.t0, T_max, cfg.times.rho);
  PicardProblem pb{train, profile, grid, times, pc.panels_per_decade};
  PicardOptions opts;
  opts.weights = {pc.mu, pc.s};
  opts.delta = pc.delta;
  opts.max_iter = pc.max_iter;
  opts.tol = pc.tol;
  opts.i_refine_tol = pc.i_refine_tol;
  opts.check_sources = pc.check_sources;
  opts.include_train_remainder = pc.include_train_remainder;
  PicardOutcome out;
  out.result = picard_solve(pb, opts);
  out.window = decay_window(times.front(), times.back(), cfg.times.rho);
  out.nls = nls_decay_report(out.result.v, out.result.v1, pc.s, out.window);
  out.transformed = transformed_decay_report(out.result.v, out.result.v1, train.mass(), train.sign, pc.s, out.window);
  return out;
}

TransformsOutcome run_transforms(const ExperimentConfig& cfg) {
  const auto& tc = cfg.transforms;
  std::mt19937_64 rng(cfg.seed);
  const SpectralGrid inner = make_grid(tc.inner_n, tc.inner_m);
  TransformsOutcome out;
  for (int f = 0; f < tc.random_fields; ++f) {
    const ComplexField u = random_packet_field(inner, rng, false);
    const double nu = l2_norm(u);
    for (double t : tc.commutation_times) {
      const ComplexField tu = pseudo_conformal_scaled(u, t);
      const ComplexField back = pseudo_conformal_scaled(tu, 1.0 / t);
      double d = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) d += std::norm(back[i] - u[i]);
      out.identities.push_back({f, t, std::sqrt(d * inner.spacing()) / nu, std::abs(l2_norm(tu) - nu) / nu});
      for (int k = 0; k <= tc.k_max; ++k) out.commutation.push_back({f, t, k, commutation_defect(u, t, k)});
    }
  }
  const ScatteringProfile profile = ScatteringProfile::make(cfg.profile);
  const SpectralGrid outer = make_grid(tc.outer_n, tc.outer_m);
  const int k_lim = std::min(tc.k_max, 1);
  for (const auto& [set, ts] : {std::pair<std::string, std::vector<double>>{"fine", tc.limit_times},
                                std::pair<std::string, std::vector<double>>{"reference", tc.limit_times_reference}}) {
    for (int k = 0; k <= k_lim; ++k) {
      std::vector<double> xs, ys;
      for (double t : ts) {
        const LimitDefect d = small_time_limit_defect(profile, t, k, outer);
        out.limit.push_back({set, d});
        if (d.defect > 0.0) {
          xs.push_back(t);
          ys.push_back(d.defect);
        }
      }
      if (xs.size() >= 2) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
          lo = std::min(lo, ys[i] / xs[i]);
          hi = std::max(hi, ys[i] / xs[i]);
        }
        out.slopes.push_back({set, k, loglog_slope(xs, ys), hi / lo});
      }
    }
  }
  return out;
}

InequalitiesOutcome run_inequalities(const ExperimentConfig& cfg) {
  InequalitiesOutcome out;
  const auto profiles = canonical_profiles();
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    const ScatteringProfile u = ScatteringProfile::make(profiles[p]);
    for (const auto& m : check_dispersion(u, cfg.inequalities.dispersion_times)) out.dispersion.push_back({int(p), m});
  }
  std::mt19937_64 rng(cfg.seed + 1);
  const SpectralGrid g = make_grid(4096, 4);
  std::vector<ComplexField> fields;
  for (int i = 0; i < cfg.inequalities.gn_fields; ++i) fields.push_back(random_packet_field(g, rng, true));
  out.gn = check_gn(fields);
  return out;
}

// ---- CLI driver ---------------------------------------------------------

namespace {

using Cells = std::vector<CsvWriter::Cell>;

class Writer {
 public:
  Writer(fs::path dir, bool quiet) : dir_(std::move(dir)), quiet_(quiet) { fs::create_directories(dir_); }

  CsvWriter csv(const std::string& name, std::vector<std::string> cols) {
    files_.push_back(name);
    return CsvWriter((dir_ / name).string(), std::move(cols));
  }
  void say(const std::string& line) const {
    if (!quiet_) std::cout << line << '\n';
  }
  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }
  void add_file(const std::string& name) { files_.push_back(name); }

 private:
  fs::path dir_;
  bool quiet_;
  std::vector<std::string> files_;
};

std::vector<std::string> fit_columns() {
  return {"series", "k", "exponent", "constant", "rms_residual", "t_lo", "t_hi", "samples"};
}

void fit_row(CsvWriter& w, const std::string& series, int k, const DecayFit& f) {
  w.row(Cells{series, (long long)k, f.exponent, f.constant, f.rms_residual, f.t_lo, f.t_hi, (long long)f.samples});
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

void dump_family(Writer& w, const std::string& sub, const std::vector<double>& times,
                 const std::vector<ComplexField>& fields) {
  fs::create_directories(w.dir() / sub);
  for (std::size_t i = 0; i < times.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "%s/snap_%04zu.csv", sub.c_str(), i);
    const ComplexField p = as_physical(fields[i]);
    CsvWriter c = w.csv(name, {"x", "re", "im"});
    c.comment("t=" + format_double(times[i]));
    for (std::size_t x = 0; x < p.size(); ++x) c.row(Cells{p.grid().x(x), p[x].real(), p[x].imag()});
  }
}

int do_selftest(const ExperimentConfig& cfg, Writer& w) {
  std::mt19937_64 rng(cfg.seed);
  auto checks = spectral_invariants(rng, 100);
  for (auto& c : transform_invariants(cfg, rng)) checks.push_back(c);
  CsvWriter c = w.csv("selftest.csv", {"check", "value", "tolerance", "pass"});
  bool ok = true;
  for (const auto& ch : checks) {
    c.row(Cells{ch.name, ch.value, ch.tolerance, (long long)ch.pass});
    w.say(std::string(ch.pass ? "PASS " : "FAIL ") + ch.name + fmt(" value=%.3e tol=%.1e", ch.value, ch.tolerance));
    ok = ok && ch.pass;
  }
  return ok ? 0 : 3;
}

int do_evolve(const ExperimentConfig& cfg, Writer& w, bool dump) {
  const EvolveOutcome o = run_evolve(cfg);
  std::vector<std::string> cols{"t", "l2_v", "substeps"};
  for (const auto& row : o.diff) cols.push_back("diff_k" + std::to_string(row.k));
  cols.push_back("nls_residual");
  CsvWriter e = w.csv("evolve.csv", cols);
  for (std::size_t i = 0; i < o.run.times.size(); ++i) {
    Cells cells{o.run.times[i], l2_norm(o.run.fields[i]), (long long)o.run.substeps[i]};
    for (const auto& row : o.diff) cells.push_back(row.values[i]);
    cells.push_back(o.residuals[i]);
    e.row(cells);
  }
  CsvWriter m = w.csv("modes.csv", {"j", "t", "re_A", "im_A", "re_R", "im_R", "abs_R"});
  for (const auto& tr : o.modes) {
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
      m.row(Cells{(long long)tr.j, tr.times[i], tr.amplitude[i].real(), tr.amplitude[i].imag(),
                  tr.remainder[i].real(), tr.remainder[i].imag(), std::abs(tr.remainder[i])});
    }
  }
  CsvWriter f = w.csv("fits.csv", fit_columns());
  for (const auto& row : o.diff) {
    if (row.exact_match) continue;
    fit_row(f, "v_minus_v1", row.k, row.fit);
    w.say(fmt("evolve: ||d^%.0f(v - v1)|| exponent %.4f", row.k, row.fit.exponent));
  }
  for (const auto& rf : o.remainder_fits) {
    if (!rf.fitted) continue;
    fit_row(f, "R_drift_j" + std::to_string(rf.j), 0, rf.drift);
    w.say(fmt("evolve: mode j=%.0f |R(1/t0)|=%.2e gamma_fit=%.4f", rf.j, rf.r_at_t0, -rf.drift.exponent));
  }
  if (dump) dump_family(w, "snapshots", o.run.times, o.run.fields);
  return 0;
}

int do_sources(const ExperimentConfig& cfg, Writer& w) {
  const SourcesOutcome o = run_sources(cfg);
  CsvWriter s = w.csv("sources.csv", {"tag", "k", "t", "norm"});
  for (const auto& [tag, per_k] : o.norms) {
    for (std::size_t k = 0; k < per_k.size(); ++k) {
      for (std::size_t i = 0; i < per_k[k].size(); ++i) {
        s.row(Cells{to_string(tag), (long long)k, o.series.times[i], per_k[k][i]});
      }
    }
  }
  CsvWriter tl = w.csv("tails.csv", {"tag", "tail_estimate"});
  for (const auto& [tag, v] : o.series.tail_estimate) tl.row(Cells{to_string(tag), v});
  CsvWriter f = w.csv("fits.csv", fit_columns());
  for (const auto& [tag, fits] : o.fits) {
    for (std::size_t k = 0; k < fits.size(); ++k) {
      fit_row(f, to_string(tag), int(k), fits[k]);
      w.say("sources: " + to_string(tag) + fmt(" k=%.0f exponent %.4f", double(k), fits[k].exponent));
    }
  }
  CsvWriter ib = w.csv("ibp.csv", {"tag", "t", "direct_norm", "ibp_norm", "boundary_norm", "remainder_norm", "rel_diff"});
  for (const auto& r : o.ibp) {
    ib.row(Cells{to_string(r.tag), r.t, r.direct_norm, r.ibp_norm, r.boundary_norm, r.remainder_norm, r.rel_diff});
    w.say("sources: " + to_string(r.tag) + fmt(" direct vs IBP at t=%.4g: rel diff %.3e", r.t, r.rel_diff));
  }
  return 0;
}

int do_picard(const ExperimentConfig& cfg, Writer& w, bool dump) {
  const PicardOutcome o = run_picard(cfg);
  CsvWriter p = w.csv("picard.csv", {"iter", "update_S_norm", "contraction_ratio", "tail_bound", "distance_S",
                                     "i_refinement_gap", "within_delta"});
  for (const auto& it : o.result.iterations) {
    p.row(Cells{(long long)it.iter, it.update_S_norm, it.contraction_ratio, it.tail_bound, it.distance_S,
                it.i_refinement_gap, (long long)(it.distance_S <= cfg.picard.delta)});
    w.say(fmt("picard: iter %.0f update %.3e ratio %.4f", it.iter, it.update_S_norm, it.contraction_ratio));
  }
  w.say(o.result.converged ? "picard: converged" : "picard: NOT converged within max_iter");
  CsvWriter d = w.csv("decay.csv", {"side", "k", "time", "value"});
  for (const auto& row : o.nls) {
    for (std::size_t i = 0; i < row.times.size(); ++i) d.row(Cells{"nls", (long long)row.k, row.times[i], row.values[i]});
  }
  for (const auto& row : o.transformed) {
    for (std::size_t i = 0; i < row.times.size(); ++i) {
      d.row(Cells{"transformed", (long long)row.k, row.times[i], row.values[i]});
    }
  }
  CsvWriter f = w.csv("fits.csv", fit_columns());
  for (const auto& [side, rows] : {std::pair{std::string("nls"), &o.nls}, std::pair{std::string("transformed"), &o.transformed}}) {
    for (const auto& row : *rows) {
      if (row.exact_match) {
        f.comment(side + " k=" + std::to_string(row.k) + ": v = v1 identically (exact match, no fit)");
        w.say("picard: " + side + " k=" + std::to_string(row.k) + " exact match");
        continue;
      }
      fit_row(f, side, row.k, row.fit);
      w.say("picard: " + side + fmt(" k=%.0f exponent %.4f", row.k, row.fit.exponent));
    }
  }
  if (dump) dump_family(w, "fixed_point", o.result.v.times, o.result.v.fields);
  return 0;
}

int do_transforms(const ExperimentConfig& cfg, Writer& w) {
  const TransformsOutcome o = run_transforms(cfg);
  CsvWriter c = w.csv("commutation.csv", {"field", "t", "k", "defect"});
  double worst = 0.0;
  for (const auto& r : o.commutation) {
    c.row(Cells{(long long)r.field, r.t, (long long)r.k, r.defect});
    worst = std::max(worst, r.defect);
  }
  w.say(fmt("transforms: worst commutation defect %.3e", worst));
  CsvWriter id = w.csv("identities.csv", {"field", "t", "involution", "isometry"});
  for (const auto& r : o.identities) id.row(Cells{(long long)r.field, r.t, r.involution, r.isometry});
  CsvWriter l = w.csv("limit.csv", {"set", "t", "k", "defect", "defect_real_k", "limit_norm"});
  for (const auto& r : o.limit) l.row(Cells{r.set, r.d.t, (long long)r.d.k, r.d.defect, r.d.defect_real_k, r.d.limit_norm});
  CsvWriter s = w.csv("limit_slopes.csv", {"set", "k", "slope", "ratio_spread"});
  for (const auto& r : o.slopes) {
    s.row(Cells{r.set, (long long)r.k, r.slope, r.ratio_spread});
    w.say("transforms: small-time defect (" + r.set + fmt(") k=%.0f slope %.4f", r.k, r.slope));
  }
  return 0;
}

int do_inequalities(const ExperimentConfig& cfg, Writer& w) {
  const InequalitiesOutcome o = run_inequalities(cfg);
  CsvWriter d = w.csv("dispersion.csv", {"profile", "t", "sup", "argmax", "l1", "sharp_bound", "loose_bound",
                                         "sharp_margin", "loose_margin"});
  double worst_sharp = std::numeric_limits<double>::infinity();
  for (const auto& [p, m] : o.dispersion) {
    d.row(Cells{(long long)p, m.t, m.sup, m.argmax, m.l1, m.sharp_bound, m.loose_bound, m.sharp_margin, m.loose_margin});
    worst_sharp = std::min(worst_sharp, m.sharp_margin);
  }
  w.say(fmt("inequalities: smallest sharp dispersion margin %.4e", worst_sharp));
  CsvWriter g = w.csv("gn.csv", {"field", "sup_sq", "product", "margin"});
  double worst_gn = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < o.gn.size(); ++i) {
    g.row(Cells{(long long)i, o.gn[i].sup_sq, o.gn[i].product, o.gn[i].margin});
    worst_gn = std::min(worst_gn, o.gn[i].margin);
  }
  w.say(fmt("inequalities: smallest GN margin %.4e", worst_gn));
  return 0;
}

int do_report(const fs::path& root, Writer& w) {
  CsvWriter s = w.csv("summary.csv", {"experiment", "series", "k", "exponent", "constant", "rms_residual", "t_lo",
                                      "t_hi", "samples"});
  int found = 0;
  for (const std::string exp : {"evolve", "sources", "picard"}) {
    std::ifstream in(root / exp / "fits.csv");
    if (!in) continue;
    ++found;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<CsvWriter::Cell> cells{exp};
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      if (cells.size() != 9) throw NumericalError("report: malformed row in " + exp + "/fits.csv");
      s.row(cells);
      w.say("report: " + exp + " " + line);
    }
  }
  for (const std::string file : {"selftest/selftest.csv", "transforms/limit_slopes.csv", "picard/picard.csv"}) {
    std::ifstream in(root / file);
    if (!in) continue;
    ++found;
    s.comment(file);
    std::string line;
    while (std::getline(in, line)) {
      s.comment("  " + line);
      w.say("report: " + file + " " + line);
    }
  }
  if (found == 0) w.say("report: no prior outputs under " + root.string());
  return 0;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names{"selftest", "evolve",       "sources", "picard",
                                              "transforms", "inequalities", "report"};
  return names;
}

int run_subcommand(const std::string& name, ExperimentConfig cfg, const RunOptions& opts) {
  if (std::find(subcommand_names().begin(), subcommand_names().end(), name) == subcommand_names().end()) {
    throw ConfigError("unknown subcommand '" + name + "'");
  }
  if (opts.panels) {
    if (*opts.panels < 4) throw ConfigError("--panels must be >= 4");
    cfg.picard.panels_per_decade = *opts.panels;
  }
  if (!opts.out_dir.empty()) cfg.output = opts.out_dir;
  const fs::path root(cfg.output);
  Writer w(root / name, opts.quiet);
  const auto start = std::chrono::steady_clock::now();
  int code = 0;
  if (name == "selftest") code = do_selftest(cfg, w);
  else if (name == "evolve") code = do_evolve(cfg, w, opts.dump);
  else if (name == "sources") code = do_sources(cfg, w);
  else if (name == "picard") code = do_picard(cfg, w, opts.dump);
  else if (name == "transforms") code = do_transforms(cfg, w);
  else if (name == "inequalities") code = do_inequalities(cfg, w);
  else code = do_report(root, w);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest;
  manifest["subcommand"] = name;
  manifest["version"] = NLSLAB_VERSION;
  manifest["config"] = nlohmann::json::parse(dump_config(cfg));
  manifest["wall_time_seconds"] = wall;
  manifest["threads"] = worker_count();
  manifest["files"] = w.files();
  manifest["exit_code"] = code;
  std::ofstream(w.dir() / "manifest.json") << manifest.dump(2) << '\n';
  return code;
}

}  // namespace nlslab
