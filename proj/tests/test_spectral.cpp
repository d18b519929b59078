#include <cmath>
#include <random>

#include "doctest.h"
#include "nlslab/errors.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;

namespace {

ComplexField plane_wave(const SpectralGrid& g, double xi, cplx a = 1.0) {
  return ComplexField::sample(g, [&](double x) { return a * std::polar(1.0, xi * x); });
}

ComplexField gaussian(const SpectralGrid& g) {
  return ComplexField::sample(g, [](double x) { return cplx(std::exp(-x * x), 0.0); });
}

}  // namespace

TEST_CASE("grid geometry") {
  const SpectralGrid g = make_grid(8, 1);
  CHECK(g.length() == doctest::Approx(4 * kPi));
  const auto lat = g.frequency_lattice();
  REQUIRE(lat.size() == 8);
  CHECK(lat.front() == doctest::Approx(-2.0));
  CHECK(lat.back() == doctest::Approx(1.5));
  CHECK(g.frequency(0) == 0.0);

  const SpectralGrid h = make_grid(4096, 4);
  CHECK(h.spacing() == doctest::Approx(16 * kPi / 4096).epsilon(1e-15));

  CHECK_THROWS_AS(make_grid(100, 1), ConfigError);
  CHECK_THROWS_AS(make_grid(64, 0), ConfigError);
  CHECK_FALSE(make_grid(64, 2).half_integer_slot(16).has_value());
}

TEST_CASE("half-integer plane wave is a single exact grid mode") {
  const SpectralGrid g = make_grid(64, 2);
  const ComplexField F = to_fourier(plane_wave(g, 1.5));
  const auto slot = g.half_integer_slot(3);
  REQUIRE(slot.has_value());
  CHECK(g.wavenumber(*slot) == 6);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k == *slot) {
      CHECK(std::abs(F[k] - cplx(g.length(), 0.0)) < 1e-12 * g.length());
    } else {
      CHECK(std::abs(F[k]) < 1e-12 * g.length());
    }
  }
}

TEST_CASE("to_fourier matches the continuum transform") {
  const SpectralGrid z = make_grid(64, 1);
  const ComplexField Z = to_fourier(ComplexField(z, Representation::physical));
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(Z[k] == cplx{});

  const SpectralGrid g = make_grid(256, 1);
  const ComplexField F = to_fourier(plane_wave(g, 0.5));
  CHECK(std::abs(F[*g.half_integer_slot(1)] - cplx(g.length(), 0)) < 1e-11);

  const SpectralGrid h = make_grid(4096, 4);
  const ComplexField G = to_fourier(gaussian(h));
  double worst = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double xi = h.frequency(k);
    worst = std::max(worst, std::abs(G[k] - std::sqrt(kPi) * std::exp(-xi * xi / 4)));
  }
  CHECK(worst < 1e-10);

  CHECK_THROWS_AS(to_fourier(G), ConfigError);
  CHECK_THROWS_AS(from_fourier(gaussian(h)), ConfigError);
}

TEST_CASE("round trip and Parseval") {
  std::mt19937_64 rng(7);
  const SpectralGrid g = make_grid(1024, 2);
  const ComplexField f = random_band_limited(g, rng, 3.0);
  const ComplexField back = from_fourier(to_fourier(f));
  CHECK(l2_norm(back - f) < 1e-12 * l2_norm(f));
  CHECK(std::abs(l2_norm(to_fourier(f)) - l2_norm(f)) < 1e-12 * l2_norm(f));
}

TEST_CASE("free propagation") {
  const SpectralGrid g = make_grid(256, 1);
  const ComplexField w = plane_wave(g, 0.5);
  CHECK(l2_norm(free_propagate(w, 0.0) - w) == 0.0);
  const ComplexField p = free_propagate(w, kPi);
  CHECK(l2_norm(p - std::polar(1.0, -kPi / 4) * w) < 1e-12 * l2_norm(w));
  CHECK(p.is_physical());

  const SpectralGrid h = make_grid(4096, 4);
  const ComplexField e = free_propagate(gaussian(h), 1.0);
  const cplx a(1.0, 4.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = h.x(i);
    worst = std::max(worst, std::abs(e[i] - std::exp(-x * x / a) / std::sqrt(a)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("derivatives and norms") {
  const SpectralGrid g = make_grid(256, 1);
  const ComplexField w = plane_wave(g, 0.5);
  CHECK(l2_norm(spatial_derivative(w, 0) - w) == 0.0);
  CHECK(l2_norm(spatial_derivative(w, 1) - cplx(0, 0.5) * w) < 1e-12 * l2_norm(w));

  const cplx a(0.3, -0.4);
  const double xi = 1.5;
  const ComplexField f = plane_wave(g, xi, a);
  for (int k = 0; k <= 3; ++k) {
    double expect = 0.0;
    for (int j = 0; j <= k; ++j) expect += std::pow(xi, 2 * j);
    expect = std::sqrt(std::norm(a) * g.length() * expect);
    CHECK(sobolev_norm(f, k) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(sobolev_norm(f, 0) == doctest::Approx(l2_norm(f)).epsilon(1e-14));

  const ComplexField zero(g, Representation::physical);
  CHECK(l2_norm(zero) == 0.0);
  CHECK(sobolev_norm(zero, 2) == 0.0);
  CHECK(lebesgue_sup(zero) == 0.0);
  CHECK(lebesgue_l1(zero) == 0.0);

  const ComplexField c = ComplexField::sample(g, [](double) { return cplx(0.0, -2.0); });
  CHECK(lebesgue_sup(c) == doctest::Approx(2.0));
  CHECK(lebesgue_l1(c) == doctest::Approx(2.0 * g.length()));

  const SpectralGrid h = make_grid(4096, 4);
  CHECK(lebesgue_l1(gaussian(h)) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-12));
}

TEST_CASE("spectral invariants on random fields") {
  std::mt19937_64 rng(11);
  for (const auto& c : spectral_invariants(rng, 10)) {
    INFO(c.name << " = " << c.value);
    CHECK(c.pass);
  }
}

TEST_CASE("boundary mass monitor") {
  const SpectralGrid h = make_grid(4096, 4);
  CHECK(boundary_mass_fraction(gaussian(h)) < 1e-30);
  CHECK(boundary_mass_fraction(ComplexField(h, Representation::physical)) == 0.0);
  const ComplexField edge = ComplexField::sample(h, [&](double x) {
    const double y = x - 0.47 * h.length();
    return cplx(std::exp(-y * y), 0.0);
  });
  CHECK(boundary_mass_fraction(edge) > 0.5);
  CHECK_THROWS_AS(require_boundary_mass(edge, "test"), BoundaryMassError);
  // A 4pi-periodic wave fills the box but is exempt.
  CHECK_NOTHROW(require_boundary_mass(plane_wave(h, 0.5), "test"));
}

TEST_CASE("field arithmetic checks compatibility") {
  const SpectralGrid a = make_grid(64, 1);
  const SpectralGrid b = make_grid(64, 2);
  ComplexField f(a, Representation::physical);
  CHECK_THROWS_AS(f += ComplexField(b, Representation::physical), ConfigError);
  CHECK_THROWS_AS(f += ComplexField(a, Representation::frequency), ConfigError);
  f[0] = cplx(std::nan(""), 0);
  CHECK_FALSE(f.all_finite());
}
