#include <cmath>
#include <random>

#include "doctest.h"
#include "nlslab/analysis.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;

TEST_CASE("fit_decay recovers planted exponents") {
  std::vector<double> t, v;
  for (int i = 0; i <= 20; ++i) t.push_back(std::pow(10.0, 1.0 + 2.0 * i / 20.0));
  for (double e : {-1.0, -0.5, 0.0, 0.75}) {
    v.clear();
    for (double s : t) v.push_back(3.0 * std::pow(s, e));
    const DecayFit f = fit_decay(t, v);
    CHECK(std::abs(f.exponent - e) < 1e-12);
    CHECK(f.constant == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(f.rms_residual < 1e-12);
  }
  v.clear();
  for (double s : t) v.push_back(std::pow(s, -0.5) * (1 + 0.1 * std::sin(std::log(s))));
  CHECK(std::abs(fit_decay(t, v).exponent + 0.5) < 0.05);
}

TEST_CASE("fit_decay preconditions") {
  std::vector<double> t{1, 2, 3, 4, 5, 6, 7, 8}, v(8, 1.0);
  CHECK_THROWS_AS(fit_decay(t, v), ConfigError);  // under a decade
  t = {1, 2, 3, 4, 5, 6, 7, 10};
  CHECK(fit_decay(t, v).exponent == doctest::Approx(0.0));
  v[2] = 0.0;
  CHECK_THROWS_AS(fit_decay(t, v), ConfigError);
  CHECK_THROWS_AS(fit_decay(std::vector<double>{1, 10}, std::vector<double>{1, 1}), ConfigError);
  // window
  std::vector<double> tt, vv;
  for (int i = 0; i < 30; ++i) {
    tt.push_back(std::pow(10.0, i / 10.0));
    vv.push_back(i < 20 ? std::pow(tt.back(), -1.0) : 1.0);
  }
  CHECK(fit_decay(tt, vv, std::make_pair(1.0, 80.0)).exponent == doctest::Approx(-1.0));
}

TEST_CASE("dispersion bound on the canonical profiles") {
  for (const auto& p : canonical_profiles()) {
    const ScatteringProfile u = ScatteringProfile::make(p);
    for (const auto& m : check_dispersion(u, std::vector<double>{1.0, 10.0})) {
      CHECK(m.sharp_margin >= 0.0);
      CHECK(m.loose_margin >= m.sharp_margin);
    }
  }
  const auto zero = ScatteringProfile::make({0, 0.25, 0.2, 0.0, 1.0, 512});
  const auto m = check_dispersion(zero, std::vector<double>{1.0});
  CHECK(m[0].sup == 0.0);
  CHECK(m[0].sharp_bound == 0.0);
  CHECK_THROWS_AS(check_dispersion(ScatteringProfile::make({}), std::vector<double>{0.0}), ConfigError);
}

TEST_CASE("Gagliardo-Nirenberg margins") {
  std::mt19937_64 rng(12);
  const SpectralGrid g = make_grid(4096, 4);
  std::vector<ComplexField> fields;
  for (int i = 0; i < 10; ++i) fields.push_back(random_packet_field(g, rng, true));
  fields.push_back(ComplexField(g, Representation::physical));
  // Mollified e^{-|x|}, close to an extremiser.
  fields.push_back(ComplexField::sample(g, [](double x) { return cplx(std::exp(-std::sqrt(x * x + 1e-2)), 0.0); }));
  for (const auto& m : check_gn(fields)) CHECK(m.margin >= -1e-10);
  const auto last = check_gn(std::span<const ComplexField>(&fields.back(), 1));
  CHECK(last[0].margin < 0.05 * last[0].product);

  const ComplexField edge = ComplexField::sample(g, [&](double x) {
    const double y = x - 0.45 * g.length();
    return cplx(std::exp(-y * y), 0.0);
  });
  CHECK_THROWS_AS(check_gn(std::span<const ComplexField>(&edge, 1)), BoundaryMassError);
}

TEST_CASE("decay reports mirror under the transform") {
  const SpectralGrid g = make_grid(1024, 8);
  std::mt19937_64 rng(6);
  const ComplexField bump = random_packet_field(g, rng, false);
  const auto times = geometric_lattice(10.0, 400.0, std::pow(2.0, 0.25));
  FieldFamily v, v1;
  for (double t : times) {
    v.times.push_back(t);
    v1.times.push_back(t);
    v1.fields.push_back(ComplexField(g, Representation::physical));
    v.fields.push_back(std::pow(t, -0.6) * free_propagate(bump, 0.01 * t));
  }
  const auto window = std::make_pair(10.0, 400.0);
  const auto nls = nls_decay_report(v, v1, 1, window);
  const auto tr = transformed_decay_report(v, v1, 0.01, 1, 1, window);
  CHECK(nls[0].fit.exponent == doctest::Approx(-0.6).epsilon(1e-9));
  CHECK(tr[0].fit.exponent == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(tr[1].fit.exponent == doctest::Approx(-nls[1].fit.exponent).epsilon(1e-6));

  const auto same = nls_decay_report(v1, v1, 0, window);
  CHECK(same[0].exact_match);
}
