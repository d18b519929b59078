#include <cmath>
#include <random>

#include "doctest.h"
#include "nlslab/errors.hpp"
#include "nlslab/evolution.hpp"
#include "nlslab/profiles.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;

namespace {

DiracTrain two_modes() {
  DiracTrain t;
  t.alphas[-1] = cplx(0.05, 0.01);
  t.alphas[2] = cplx(-0.02, 0.04);
  return t;
}

ScatteringProfile canonical() { return ScatteringProfile::make({}); }

}  // namespace

TEST_CASE("train bookkeeping") {
  const DiracTrain t = two_modes();
  CHECK(t.mass() == doctest::Approx(0.05 * 0.05 + 0.01 * 0.01 + 0.02 * 0.02 + 0.04 * 0.04).epsilon(1e-14));
  const double w2 = std::pow(2.0, 4) * std::norm(t.alphas.at(-1)) + std::pow(3.0, 4) * std::norm(t.alphas.at(2));
  CHECK(t.weighted_norm() == doctest::Approx(std::sqrt(w2)).epsilon(1e-14));
  // The two phase laws agree for one mode.
  DiracTrain one;
  one.alphas[0] = 0.3;
  DiracTrain text = one;
  text.law = PhaseLaw::textbook();
  CHECK(one.theta(0, 7.0) == doctest::Approx(text.theta(0, 7.0)).epsilon(1e-15));
}

TEST_CASE("dirac wave values") {
  DiracTrain empty;
  empty.alphas[1] = 0.0;
  const SpectralGrid g = make_grid(64, 1);
  CHECK(l2_norm(sample_dirac_wave(empty, 2.0, g)) == 0.0);

  DiracTrain one;
  one.alphas[0] = 0.3;
  const auto v = evaluate(dirac_wave(one, 1.0), std::vector<double>{-3.0, 0.0, 11.0});
  for (const auto& c : v) CHECK(std::abs(c - cplx(0.3, 0.0)) < 1e-15);

  // Grid sampling of a train has coefficients only on the lattice modes.
  const DiracTrain t = two_modes();
  const SpectralGrid h = make_grid(256, 4);
  const ComplexField F = to_fourier(sample_dirac_wave(t, 3.3, h));
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h.wavenumber(k) % 4 != 0) CHECK(std::abs(F[k]) < 1e-12);
  }
  // sup bound
  const double sup = lebesgue_sup(sample_dirac_wave(t, 3.3, h));
  CHECK(sup <= std::abs(t.alphas.at(-1)) + std::abs(t.alphas.at(2)) + 1e-14);
  // meshless and grid sampling agree
  const ComplexField s = sample(dirac_wave(t, 3.3), h);
  CHECK(l2_norm(s - sample_dirac_wave(t, 3.3, h)) < 1e-12);

  CHECK_THROWS_AS(sample_dirac_wave(t, 1.0, make_grid(8, 2)), ConfigError);
}

TEST_CASE("single mode solves the equation with the default phase law") {
  DiracTrain one;
  one.alphas[0] = 0.3;
  const SpectralGrid g = make_grid(8, 1);
  SolverRun run;
  run.M = one.mass();
  for (double t : {1.0 - 1e-5, 1.0, 1.0 + 1e-5}) {
    run.times.push_back(t);
    run.fields.push_back(sample_dirac_wave(one, t, g));
  }
  CHECK(nls_residual(run, 1) < 1e-9 * l2_norm(run.fields[1]));
}

TEST_CASE("single Dirac closed forms") {
  const auto z = single_dirac_closed_forms(0.0, 1.0);
  for (const auto& c : evaluate(z.u(2.0), std::vector<double>{0.0, 5.0})) CHECK(c == cplx{});
  CHECK_THROWS_AS(z.u(0.0), ConfigError);

  const cplx alpha(0.2, -0.1);
  const auto c = single_dirac_closed_forms(alpha, single_dirac_lambda(PhaseLaw{}, 1));
  for (const auto& v : evaluate(c.u(3.0), std::vector<double>{-4.0, 0.5, 9.0})) {
    CHECK(std::abs(v) == doctest::Approx(std::abs(alpha) / std::sqrt(3.0)).epsilon(1e-14));
  }
  // psi_1 = e^{ix^2/4t}/sqrt(t) is a free solution: i psi_t + psi_xx = 0 by central differences.
  const auto one = single_dirac_closed_forms(1.0, 0.0);
  const double t = 2.0, h = 1e-4;
  for (double x : {-3.0, 0.0, 1.7, 6.0}) {
    auto at = [&](double tt, double xx) { return evaluate(one.psi(tt), std::vector<double>{xx})[0]; };
    const cplx dt = (at(t + h, x) - at(t - h, x)) / (2 * h);
    const cplx dxx = (at(t, x + h) - 2.0 * at(t, x) + at(t, x - h)) / (h * h);
    CHECK(std::abs(cplx(0, 1) * dt + dxx) < 1e-6);
  }
}

TEST_CASE("profile validation") {
  CHECK_NOTHROW(ScatteringProfile::make({0, 0.25, 0.125, 1.0, 1.0, 512}));
  try {
    ScatteringProfile::make({0, 0.4, 0.1, 1.0, 1.0, 512});
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("half-integer avoidance condition") != std::string::npos);
  }
  CHECK_THROWS_AS(ScatteringProfile::make({0, 0.25, 0.0, 1.0, 1.0, 512}), ConfigError);
  const auto zero = ScatteringProfile::make({0, 0.25, 0.1, 0.0, 1.0, 512});
  CHECK(zero.is_zero());
  CHECK(zero.l2_norm() == 0.0);
  CHECK(zero.derivative_norm(2) == 0.0);
}

TEST_CASE("half-integer avoidance check") {
  const auto u = ScatteringProfile::make({0, 0.25, 0.125, 1.0, 1.0, 512});
  for (int p = -20; p <= 20; ++p) {
    for (int k = 0; k <= 1; ++k) {
      const AvoidanceCheck c = check_half_integer_avoidance(u, p, k);
      INFO("shift " << p << " order " << k);
      CHECK(c.stable);
      CHECK(std::isfinite(c.refinements.back()));
    }
  }
  // Support containing 0: dividing by xi blows up under refinement.
  const auto bad = ScatteringProfile::unchecked({0, 0.0, 0.2, 1.0, 1.0, 512});
  const AvoidanceCheck c = check_half_integer_avoidance(bad, 0, 0);
  CHECK_FALSE(c.stable);
  CHECK(c.refinements.back() > 2.0 * c.refinements.front());
}

TEST_CASE("meshless free evolution") {
  const ScatteringProfile u = canonical();
  const QuadratureRule r = u.rule(512);
  double integral = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) integral += r.weights[i] * u.hat(r.nodes[i]);
  const auto v = evaluate(u.evolved(0.0), std::vector<double>{0.0});
  CHECK(std::abs(v[0] - integral / (2 * kPi)) < 1e-13);

  // Sampled L^2 norm is time independent and matches the frequency-side norm.
  // The box is wide because the profile's spatial tail decays only like
  // exp(-c sqrt|x|), and the spectral sample is its periodisation.
  const SpectralGrid g = make_grid(16384, 1024);
  for (double t : {0.0, 10.0, 100.0}) {
    const ComplexField f = sample(u.evolved(t, 0, u.nodes_for(t, 0.5 * g.length())), g);
    CHECK(l2_norm(f) == doctest::Approx(u.l2_norm()).epsilon(1e-10));
    // Spectral sampling agrees with the meshless one.
    CHECK(l2_norm(f - u.sample(g, t)) < 1e-10 * u.l2_norm());
  }
  // Too few nodes for a far-away point is detected.
  std::vector<double> far{5000.0};
  std::vector<cplx> out(1);
  CHECK_THROWS_AS(u.evolve(1.0, far, out, 0, 32), QuadratureError);
}

TEST_CASE("v1 assembly: meshless and grid agree") {
  const DiracTrain t = two_modes();
  const ScatteringProfile u = canonical();
  const SpectralGrid g = make_grid(16384, 1024);
  const double time = 5.0;
  const ComplexField grid_v1 = sample_v1(t, u, time, g);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(g.size() / 2 - 4000, g.size() / 2 + 4000);
  std::vector<double> xs;
  std::vector<std::size_t> idx;
  for (int i = 0; i < 10; ++i) {
    idx.push_back(pick(rng));
    xs.push_back(g.x(idx.back()));
  }
  const auto mesh = evaluate(v1_assemble(t, u, time), xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(mesh[i] - grid_v1[idx[i]]) < 1e-10);

  DiracTrain none;
  const auto pure = evaluate(v1_assemble(none, u, time), xs);
  const auto free = evaluate(u.evolved(time), xs);
  for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(pure[i] - free[i]) < 1e-15);
}

TEST_CASE("mode extraction") {
  const DiracTrain t = two_modes();
  const SpectralGrid g = make_grid(2048, 16);
  const ScatteringProfile u = canonical();
  std::vector<double> times{2.0, 3.0, 5.0};
  std::vector<ComplexField> pure, mixed;
  for (double s : times) {
    pure.push_back(sample_dirac_wave(t, s, g));
    mixed.push_back(sample_v1(t, u, s, g));
  }
  for (const auto& tr : extract_modes(times, pure, t)) {
    for (const auto& r : tr.remainder) CHECK(std::abs(r) < 1e-12);
  }
  const auto a = extract_modes(times, pure, t);
  const auto b = extract_modes(times, mixed, t);
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(std::abs(a[m].amplitude[i] - b[m].amplitude[i]) < 1e-12);
  }
}
