#include "nlslab/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "nlslab/errors.hpp"
#include "nlslab/fft.hpp"

namespace nlslab {

namespace {

// (-1)^{kk}: the phase e^{i xi_k L/2} from the box starting at -L/2.
double parity(std::ptrdiff_t kk) { return (kk & 1) ? -1.0 : 1.0; }

void require_rep(const ComplexField& f, Representation rep, const char* op) {
  if (f.representation() != rep) {
    throw ConfigError(std::string(op) + ": wrong field representation");
  }
}

}  // namespace

ComplexField to_fourier(const ComplexField& f) {
  require_rep(f, Representation::physical, "to_fourier");
  const auto& g = f.grid();
  ComplexField out(g, Representation::frequency);
  fft::forward(f.values().data(), out.values().data(), g.size());
  const double dx = g.spacing();
  for (std::size_t k = 0; k < g.size(); ++k) out[k] *= dx * parity(g.wavenumber(k));
  return out;
}

ComplexField from_fourier(const ComplexField& F) {
  require_rep(F, Representation::frequency, "from_fourier");
  const auto& g = F.grid();
  ComplexField out(g, Representation::physical);
  for (std::size_t k = 0; k < g.size(); ++k) out[k] = F[k] * parity(g.wavenumber(k));
  fft::backward(out.values().data(), out.values().data(), g.size());
  const double inv_l = 1.0 / g.length();
  for (auto& v : out.values()) v *= inv_l;
  return out;
}

ComplexField as_physical(const ComplexField& f) { return f.is_physical() ? f : from_fourier(f); }
ComplexField as_frequency(const ComplexField& f) { return f.is_physical() ? to_fourier(f) : f; }

ComplexField free_propagate(const ComplexField& f, double t) {
  if (t == 0.0) return f;
  ComplexField F = as_frequency(f);
  const auto& g = F.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double xi = g.frequency(k);
    F[k] *= std::polar(1.0, -t * xi * xi);
  }
  return f.is_physical() ? from_fourier(F) : F;
}

ComplexField spatial_derivative(const ComplexField& f, int k) {
  if (k < 0) throw ConfigError("derivative order must be nonnegative");
  if (k == 0) return f;
  ComplexField F = as_frequency(f);
  const auto& g = F.grid();
  for (std::size_t i = 0; i < g.size(); ++i) F[i] *= std::pow(cplx(0.0, g.frequency(i)), k);
  return f.is_physical() ? from_fourier(F) : F;
}

double l2_norm(const ComplexField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::norm(v);
  const auto& g = f.grid();
  return std::sqrt(f.is_physical() ? s * g.spacing() : s / g.length());
}

double derivative_norm(const ComplexField& f, int k) {
  if (k < 0) throw ConfigError("derivative order must be nonnegative");
  const ComplexField F = as_frequency(f);
  const auto& g = F.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += std::pow(g.frequency(i), 2 * k) * std::norm(F[i]);
  return std::sqrt(s / g.length());
}

double sobolev_norm(const ComplexField& f, int k) {
  if (k < 0) throw ConfigError("Sobolev order must be nonnegative");
  const ComplexField F = as_frequency(f);
  const auto& g = F.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xi2 = g.frequency(i) * g.frequency(i);
    double w = 0.0, p = 1.0;
    for (int j = 0; j <= k; ++j, p *= xi2) w += p;
    s += w * std::norm(F[i]);
  }
  return std::sqrt(s / g.length());
}

double lebesgue_sup(const ComplexField& f) {
  const ComplexField p = as_physical(f);
  double m = 0.0;
  for (const auto& v : p.values()) m = std::max(m, std::abs(v));
  return m;
}

double lebesgue_l1(const ComplexField& f) {
  const ComplexField p = as_physical(f);
  double s = 0.0;
  for (const auto& v : p.values()) s += std::abs(v);
  return s * p.grid().spacing();
}

double boundary_mass_fraction(const ComplexField& f, double edge) {
  const ComplexField p = as_physical(f);
  const auto& g = p.grid();
  const double cut = (1.0 - edge) * 0.5 * g.length();
  double total = 0.0, outer = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = std::norm(p[i]);
    total += w;
    if (std::abs(g.x(i)) > cut) outer += w;
  }
  return total > 0.0 ? outer / total : 0.0;
}

ComplexField aperiodic_part(const ComplexField& f) {
  ComplexField F = as_frequency(f);
  const auto& g = F.grid();
  if (const auto m = g.box_multiple()) {
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.wavenumber(k) % *m == 0) F[k] = 0.0;
    }
  }
  return f.is_physical() ? from_fourier(F) : F;
}

void require_boundary_mass(const ComplexField& f, const std::string& where, double threshold) {
  // Outer mass of the aperiodic part over the mass of the whole field, so
  // roundoff left after removing the periodic modes does not count.
  const ComplexField a = aperiodic_part(f);
  const double whole = l2_norm(f);
  const double part = l2_norm(a);
  const double frac = whole > 0.0 ? boundary_mass_fraction(a) * (part / whole) * (part / whole) : 0.0;
  if (!std::isfinite(frac) || frac > threshold) throw BoundaryMassError(where, frac);
}

}  // namespace nlslab
