#include <cmath>
#include <random>

#include "doctest.h"
#include "nlslab/duhamel.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;

namespace {

DiracTrain pair_train(double a = 0.1 / std::sqrt(32.0)) {
  DiracTrain t;
  t.alphas[-1] = a;
  t.alphas[1] = cplx(0.0, a);
  return t;
}

const SpectralGrid& small_grid() {
  static const SpectralGrid g = make_grid(2048, 64);
  return g;
}

double total(const SourceSeries& s, SourceTag tag) {
  double v = 0.0;
  for (const auto& f : s.terms.at(tag)) v += l2_norm(f);
  return v;
}

}  // namespace

TEST_CASE("source tag names") {
  for (SourceTag t : all_source_tags()) CHECK(parse_source_tag(to_string(t)) == t);
  CHECK_THROWS_AS(parse_source_tag("Jz"), ConfigError);
}

TEST_CASE("vanishing cascades") {
  const ScatteringProfile u = ScatteringProfile::make({});
  const ScatteringProfile zero = ScatteringProfile::make({0, 0.25, 0.2, 0.0, 1.0, 512});
  const std::vector<double> times{20.0, 40.0};
  const std::vector<SourceTag> five{SourceTag::Ja, SourceTag::Jb, SourceTag::Jc, SourceTag::Jd, SourceTag::Je};

  const SourceSeries no_train = compute_source_terms({DiracTrain{}, u, 200.0, 4, nullptr}, times, small_grid(), five);
  for (SourceTag t : {SourceTag::Ja, SourceTag::Jb, SourceTag::Jc, SourceTag::Jd}) CHECK(total(no_train, t) == 0.0);
  CHECK(total(no_train, SourceTag::Je) > 0.0);

  const SourceSeries no_profile = compute_source_terms({pair_train(), zero, 200.0, 4, nullptr}, times, small_grid(), five);
  for (SourceTag t : five) CHECK(total(no_profile, t) == 0.0);

  DiracTrain one;
  one.alphas[0] = 0.05;
  const SourceSeries single = compute_source_terms({one, u, 200.0, 4, nullptr}, times, small_grid(), {SourceTag::Ja});
  CHECK(total(single, SourceTag::Ja) == 0.0);

  // The train's own non-resonant interaction vanishes for one mode, not for two.
  const SourceSeries jn1 = compute_source_terms({one, zero, 200.0, 4, nullptr}, times, small_grid(), {SourceTag::Jn});
  CHECK(total(jn1, SourceTag::Jn) < 1e-15);
  const SourceSeries jn2 = compute_source_terms({pair_train(), zero, 200.0, 4, nullptr}, times, small_grid(), {SourceTag::Jn});
  CHECK(total(jn2, SourceTag::Jn) > 0.0);
}

TEST_CASE("direct and integration-by-parts evaluators agree") {
  const ScatteringProfile u = ScatteringProfile::make({});
  const SourceSpec spec{pair_train(), u, 200.0, 4, nullptr};
  for (SourceTag tag : {SourceTag::Ja, SourceTag::Jc}) {
    const ComplexField direct = source_term(spec, tag, 20.0, small_grid());
    const IbpParts ibp = source_term_ibp(spec, tag, 20.0, small_grid());
    INFO(to_string(tag));
    CHECK(l2_norm(ibp.total - direct) < 1e-5 * l2_norm(direct));
    CHECK(l2_norm(ibp.remainder) < l2_norm(ibp.boundary));
  }
  CHECK_THROWS_AS(source_term_ibp(spec, SourceTag::Jd, 20.0, small_grid()), ConfigError);
}

TEST_CASE("panel refinement check") {
  const ScatteringProfile u = ScatteringProfile::make({});
  const SourceSpec spec{pair_train(), u, 200.0, 4, nullptr};
  const SourceSeries checked = compute_source_terms_checked(spec, {20.0, 50.0}, small_grid(), {SourceTag::Jd});
  // The checked pass returns the doubled-panel result.
  SourceSpec fine = spec;
  fine.panels_per_decade = 8;
  const SourceSeries direct = compute_source_terms(fine, {20.0, 50.0}, small_grid(), {SourceTag::Jd});
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(l2_norm(checked.terms.at(SourceTag::Jd)[i] - direct.terms.at(SourceTag::Jd)[i]) == 0.0);
  SourceSpec bad = spec;
  bad.panels_per_decade = 2;
  CHECK_THROWS_AS(compute_source_terms(bad, {20.0}, small_grid(), {SourceTag::Jd}), ConfigError);
}

TEST_CASE("Jb uses measured remainders") {
  const ScatteringProfile u = ScatteringProfile::make({});
  std::vector<ModeTrace> traces{{-1, {20.0, 200.0}, {0.0, 0.0}, {cplx(1e-3, 0), cplx(1e-4, 0)}},
                                {1, {20.0, 200.0}, {0.0, 0.0}, {0.0, 0.0}}};
  const SourceSpec spec{pair_train(), u, 200.0, 4, &traces};
  const SourceSeries s = compute_source_terms(spec, {20.0}, small_grid(), {SourceTag::Jb});
  CHECK(total(s, SourceTag::Jb) > 0.0);
}

TEST_CASE("functional I and phi") {
  const DiracTrain train = pair_train();
  const ScatteringProfile u = ScatteringProfile::make({});
  const auto times = geometric_lattice(20.0, 200.0, std::pow(2.0, 0.125));
  const FieldFamily v1 = sample_v1_family(train, u, times, small_grid());
  const double M = train.mass();

  const IResult zero = functional_I(v1, v1, M, 1);
  for (const auto& f : zero.values) CHECK(l2_norm(f) == 0.0);

  // Linear response to a small bump.
  std::mt19937_64 rng(3);
  const ComplexField bump = random_packet_field(small_grid(), rng, false);
  auto perturbed = [&](double eps) {
    FieldFamily v = v1;
    for (auto& f : v.fields) f += (eps / l2_norm(bump)) * bump;
    return functional_I(v, v1, M, 1).values.front();
  };
  const double a = l2_norm(perturbed(1e-4));
  const double b = l2_norm(perturbed(1e-3));
  CHECK(b / a == doctest::Approx(10.0).epsilon(0.01));

  // phi(v1) - v1 is exactly the source sum.
  std::vector<ComplexField> src(times.size(), ComplexField(small_grid(), Representation::physical));
  src[0] = bump;
  const FieldFamily p = phi_apply(v1, v1, src, M, 1);
  CHECK(l2_norm(p.fields[0] - v1.fields[0] - bump) < 1e-15 * l2_norm(bump));
  CHECK(l2_norm(p.fields[1] - v1.fields[1]) == 0.0);
}

TEST_CASE("S norm") {
  const SpectralGrid g = make_grid(256, 2);
  std::mt19937_64 rng(1);
  const ComplexField f = random_band_limited(g, rng, 1.0);
  FieldFamily zero{{1.0, 2.0}, {ComplexField(g, Representation::physical), ComplexField(g, Representation::physical)}};
  CHECK(s_norm(zero, {}) == 0.0);
  FieldFamily one{{1.0}, {f}};
  CHECK(s_norm(one, {0.4, 1}) == doctest::Approx(l2_norm(f) + derivative_norm(f, 1)).epsilon(1e-14));
  FieldFamily decaying;
  for (double t : {4.0, 8.0, 16.0}) {
    decaying.times.push_back(t);
    decaying.fields.push_back((1.0 / std::sqrt(t)) * f);
  }
  const double expect = std::pow(4.0, -0.1) * (l2_norm(f) + derivative_norm(f, 1));
  CHECK(s_norm(decaying, {0.4, 1}) == doctest::Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(s_norm(FieldFamily{}, {}), ConfigError);
}

TEST_CASE("single mode: phi leaves v1 fixed") {
  DiracTrain one;
  one.alphas[1] = cplx(0.02, 0.01);
  const ScatteringProfile zero = ScatteringProfile::make({0, 0.25, 0.2, 0.0, 1.0, 512});
  PicardProblem pb{one, zero, small_grid(), geometric_lattice(20.0, 200.0, std::pow(2.0, 0.125)), 4};
  const PicardResult r = picard_solve(pb, {});
  CHECK(r.converged);
  CHECK(r.iterations.front().update_S_norm < 1e-14);
}

TEST_CASE("picard on trivial data converges at once") {
  const ScatteringProfile zero = ScatteringProfile::make({0, 0.25, 0.2, 0.0, 1.0, 512});
  PicardProblem pb{DiracTrain{}, zero, small_grid(), geometric_lattice(20.0, 200.0, 2.0), 4};
  const PicardResult r = picard_solve(pb, {});
  CHECK(r.converged);
  CHECK(r.iterations.size() == 1);
  for (const auto& f : r.v.fields) CHECK(l2_norm(f) == 0.0);
}

TEST_CASE("picard contracts on a small problem") {
  PicardProblem pb{pair_train(), ScatteringProfile::make({}), small_grid(),
                   geometric_lattice(20.0, 200.0, std::pow(2.0, 0.125)), 4};
  PicardOptions opts;
  opts.check_sources = false;
  const PicardResult r = picard_solve(pb, opts);
  CHECK(r.converged);
  for (std::size_t i = 1; i < r.iterations.size(); ++i) CHECK(r.iterations[i].contraction_ratio < 1.0);
  CHECK(r.iterations.back().distance_S < opts.delta);
}
