#include "nlslab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "nlslab/errors.hpp"

namespace nlslab {

using json = nlohmann::json;

ExperimentConfig::ExperimentConfig() {
  // ||alpha||_{l^{2,2}} = 0.1 split over modes -1 and +1.
  const double a = 0.1 / std::sqrt(32.0);
  train.alphas = {{-1, a, 0.0}, {1, 0.0, a}};
}

DiracTrain ExperimentConfig::dirac_train() const {
  DiracTrain t;
  for (const auto& e : train.alphas) {
    if (!t.alphas.emplace(e.j, cplx(e.re, e.im)).second) {
      throw ConfigError("train.alphas lists mode " + std::to_string(e.j) + " twice");
    }
  }
  t.q = train.q;
  t.sign = train.sign;
  t.law = train.law;
  return t;
}

std::vector<SourceTag> ExperimentConfig::source_tags() const {
  std::vector<SourceTag> out;
  for (const auto& s : sources.terms) out.push_back(parse_source_tag(s));
  return out;
}

namespace {

json to_json(const ExperimentConfig& c) {
  json alphas = json::array();
  for (const auto& e : c.train.alphas) alphas.push_back({e.j, e.re, e.im});
  json j;
  j["grid"] = {{"n", c.grid.n}, {"m", c.grid.m}};
  j["train"] = {{"alphas", alphas},
                {"q", c.train.q},
                {"sign", c.train.sign},
                {"phase_law",
                 {{"kappa", c.train.law.kappa},
                  {"self", c.train.law.self},
                  {"mass", c.train.law.mass},
                  {"offset", c.train.law.offset}}}};
  j["profile"] = {{"cell", c.profile.cell},         {"center", c.profile.center},
                  {"width", c.profile.width},       {"amplitude", c.profile.amplitude},
                  {"smoothness", c.profile.smoothness}, {"quad_nodes", c.profile.quad_nodes}};
  j["times"] = {{"t0", c.times.t0}, {"t_end", c.times.t_end}, {"rho", c.times.rho}};
  j["evolve"] = {{"h_max", c.evolve.h_max}};
  const auto& p = c.picard;
  j["picard"] = {{"mu", p.mu},
                 {"s", p.s},
                 {"delta", p.delta},
                 {"max_iter", p.max_iter},
                 {"tol", p.tol},
                 {"T_max_factor", p.T_max_factor},
                 {"panels_per_decade", p.panels_per_decade},
                 {"i_refine_tol", p.i_refine_tol},
                 {"include_train_remainder", p.include_train_remainder},
                 {"check_sources", p.check_sources},
                 {"alpha_max", p.alpha_max},
                 {"t0_min", p.t0_min}};
  const auto& s = c.sources;
  j["sources"] = {{"n", s.n},          {"m", s.m},         {"t_start", s.t_start}, {"t_stop", s.t_stop},
                  {"samples", s.samples}, {"T_max", s.T_max}, {"terms", s.terms}};
  const auto& t = c.transforms;
  j["transforms"] = {{"commutation_times", t.commutation_times},
                     {"random_fields", t.random_fields},
                     {"k_max", t.k_max},
                     {"inner_n", t.inner_n},
                     {"inner_m", t.inner_m},
                     {"limit_times", t.limit_times},
                     {"limit_times_reference", t.limit_times_reference},
                     {"outer_n", t.outer_n},
                     {"outer_m", t.outer_m}};
  j["inequalities"] = {{"dispersion_times", c.inequalities.dispersion_times},
                       {"gn_fields", c.inequalities.gn_fields}};
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j;
}

// Reads known keys of one object, rejecting anything else.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_ + " must be an object");
  }
  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown config key " + path_ + "." + it.key());
    }
  }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!obj_.contains(key)) return;
    const json& v = obj_.at(key);
    const std::string where = path_ + "." + key;
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.get<long long>() < 0) throw ConfigError(where + " must be nonnegative");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + " must be a string");
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw ConfigError(where + " must be an array of numbers");
      for (const auto& e : v) {
        if (!e.is_number()) throw ConfigError(where + " must be an array of numbers");
      }
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
      if (!v.is_array()) throw ConfigError(where + " must be an array of strings");
      for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError(where + " must be an array of strings");
      }
    }
    out = v.get<T>();
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(obj_.contains(key) ? obj_.at(key) : empty, path_ + "." + key);
  }

  const json* raw(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) ? &obj_.at(key) : nullptr;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void validate(const ExperimentConfig& c) {
  require(c.grid.n >= 8 && (c.grid.n & (c.grid.n - 1)) == 0, "grid.n must be a power of two >= 8");
  require(c.grid.m >= 1, "grid.m must be >= 1");
  require(c.train.sign == 1 || c.train.sign == -1, "train.sign must be +1 or -1");
  require(c.train.q >= 0.0, "train.q must be >= 0");
  require(c.profile.width > 0.0, "profile.width must be positive");
  require(c.profile.smoothness > 0.0, "profile.smoothness must be positive");
  require(c.profile.quad_nodes >= 16, "profile.quad_nodes must be >= 16");
  require(c.times.t0 > 0.0, "times.t0 must be positive");
  require(c.times.t_end > c.times.t0, "times.t_end must exceed times.t0");
  require(c.times.rho > 1.0, "times.rho must exceed 1");
  require(c.evolve.h_max > 0.0, "evolve.h_max must be positive");
  const auto& p = c.picard;
  require(p.mu > 0.0 && p.mu < 0.5, "picard.mu must lie in (0, 1/2)");
  require(p.s >= 1 && p.s <= 4, "picard.s must lie in [1, 4]");
  require(p.delta > 0.0, "picard.delta must be positive");
  require(p.max_iter >= 1, "picard.max_iter must be >= 1");
  require(p.tol > 0.0, "picard.tol must be positive");
  require(p.T_max_factor >= 10.0, "picard.T_max_factor must be >= 10");
  require(p.panels_per_decade >= 4, "picard.panels_per_decade must be >= 4");
  require(p.i_refine_tol > 0.0, "picard.i_refine_tol must be positive");
  const auto& s = c.sources;
  require(s.n >= 8 && (s.n & (s.n - 1)) == 0, "sources.n must be a power of two >= 8");
  require(s.m >= 1, "sources.m must be >= 1");
  require(s.t_start > 0.0 && s.t_stop > s.t_start, "sources.t_start/t_stop must satisfy 0 < t_start < t_stop");
  require(s.samples >= 2, "sources.samples must be >= 2");
  require(s.T_max >= s.t_stop, "sources.T_max must be >= sources.t_stop");
  require(s.T_max >= 10.0 * s.t_start, "sources.T_max must be >= 10 * sources.t_start");
  for (const auto& name : s.terms) parse_source_tag(name);
  const auto& t = c.transforms;
  for (double v : t.commutation_times) require(v > 0.0, "transforms.commutation_times must be positive");
  for (double v : t.limit_times) require(v > 0.0 && v <= 1.0, "transforms.limit_times must lie in (0, 1]");
  for (double v : t.limit_times_reference) {
    require(v > 0.0 && v <= 1.0, "transforms.limit_times_reference must lie in (0, 1]");
  }
  require(t.random_fields >= 1, "transforms.random_fields must be >= 1");
  require(t.k_max >= 0 && t.k_max <= 4, "transforms.k_max must lie in [0, 4]");
  require(t.inner_n >= 8 && (t.inner_n & (t.inner_n - 1)) == 0, "transforms.inner_n must be a power of two >= 8");
  require(t.outer_n >= 8 && (t.outer_n & (t.outer_n - 1)) == 0, "transforms.outer_n must be a power of two >= 8");
  require(t.inner_m >= 1 && t.outer_m >= 1, "transforms.inner_m/outer_m must be >= 1");
  for (double v : c.inequalities.dispersion_times) require(v > 0.0, "inequalities.dispersion_times must be positive");
  require(c.inequalities.gn_fields >= 1, "inequalities.gn_fields must be >= 1");
  c.dirac_train();  // duplicate modes
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  {
    Section root(j, "config");
    {
      auto g = root.sub("grid");
      g.read("n", c.grid.n);
      g.read("m", c.grid.m);
    }
    {
      auto t = root.sub("train");
      if (const json* a = t.raw("alphas")) {
        if (!a->is_array()) throw ConfigError("train.alphas must be an array of [j, re, im]");
        c.train.alphas.clear();
        for (const auto& e : *a) {
          if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number() || !e[2].is_number()) {
            throw ConfigError("train.alphas entries must be [j, re, im] with integer j");
          }
          c.train.alphas.push_back({e[0].get<int>(), e[1].get<double>(), e[2].get<double>()});
        }
      }
      t.read("q", c.train.q);
      t.read("sign", c.train.sign);
      auto law = t.sub("phase_law");
      law.read("kappa", c.train.law.kappa);
      law.read("self", c.train.law.self);
      law.read("mass", c.train.law.mass);
      law.read("offset", c.train.law.offset);
    }
    {
      auto p = root.sub("profile");
      p.read("cell", c.profile.cell);
      p.read("center", c.profile.center);
      p.read("width", c.profile.width);
      p.read("amplitude", c.profile.amplitude);
      p.read("smoothness", c.profile.smoothness);
      p.read("quad_nodes", c.profile.quad_nodes);
    }
    {
      auto t = root.sub("times");
      t.read("t0", c.times.t0);
      t.read("t_end", c.times.t_end);
      t.read("rho", c.times.rho);
    }
    {
      auto e = root.sub("evolve");
      e.read("h_max", c.evolve.h_max);
    }
    {
      auto p = root.sub("picard");
      p.read("mu", c.picard.mu);
      p.read("s", c.picard.s);
      p.read("delta", c.picard.delta);
      p.read("max_iter", c.picard.max_iter);
      p.read("tol", c.picard.tol);
      p.read("T_max_factor", c.picard.T_max_factor);
      p.read("panels_per_decade", c.picard.panels_per_decade);
      p.read("i_refine_tol", c.picard.i_refine_tol);
      p.read("include_train_remainder", c.picard.include_train_remainder);
      p.read("check_sources", c.picard.check_sources);
      p.read("alpha_max", c.picard.alpha_max);
      p.read("t0_min", c.picard.t0_min);
    }
    {
      auto s = root.sub("sources");
      s.read("n", c.sources.n);
      s.read("m", c.sources.m);
      s.read("t_start", c.sources.t_start);
      s.read("t_stop", c.sources.t_stop);
      s.read("samples", c.sources.samples);
      s.read("T_max", c.sources.T_max);
      s.read("terms", c.sources.terms);
    }
    {
      auto t = root.sub("transforms");
      t.read("commutation_times", c.transforms.commutation_times);
      t.read("random_fields", c.transforms.random_fields);
      t.read("k_max", c.transforms.k_max);
      t.read("inner_n", c.transforms.inner_n);
      t.read("inner_m", c.transforms.inner_m);
      t.read("limit_times", c.transforms.limit_times);
      t.read("limit_times_reference", c.transforms.limit_times_reference);
      t.read("outer_n", c.transforms.outer_n);
      t.read("outer_m", c.transforms.outer_m);
    }
    {
      auto q = root.sub("inequalities");
      q.read("dispersion_times", c.inequalities.dispersion_times);
      q.read("gn_fields", c.inequalities.gn_fields);
    }
    root.read("seed", c.seed);
    root.read("output", c.output);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

}  // namespace nlslab
