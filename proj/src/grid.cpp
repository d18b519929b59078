#include "nlslab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlslab/errors.hpp"

namespace nlslab {

namespace {
bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

SpectralGrid::SpectralGrid(std::size_t n, double length, std::optional<int> m)
    : n_(n), length_(length), dx_(length / static_cast<double>(n)), dxi_(2.0 * kPi / length), m_(m) {
  if (!is_power_of_two(n) || n < 8) {
    throw ConfigError("grid size must be a power of two >= 8, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("grid length must be positive");
}

SpectralGrid::SpectralGrid(std::size_t n, int m) : SpectralGrid(n, 4.0 * kPi * m, m) {
  if (m < 1) throw ConfigError("box multiple m must be >= 1, got " + std::to_string(m));
  // Exact so that xi_k = k/(2m) without rounding drift.
  dxi_ = 1.0 / (2.0 * m);
}

SpectralGrid SpectralGrid::with_length(std::size_t n, double length) {
  return SpectralGrid(n, length, std::nullopt);
}

std::vector<double> SpectralGrid::points() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = x(i);
  return out;
}

std::vector<double> SpectralGrid::frequencies() const {
  std::vector<double> out(n_);
  for (std::size_t k = 0; k < n_; ++k) out[k] = frequency(k);
  return out;
}

std::vector<double> SpectralGrid::frequency_lattice() const {
  auto out = frequencies();
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t SpectralGrid::slot_of_wavenumber(std::ptrdiff_t kk) const {
  const auto n = static_cast<std::ptrdiff_t>(n_);
  if (kk < -n / 2 || kk >= n / 2) throw ConfigError("wavenumber outside the grid band");
  return static_cast<std::size_t>(kk < 0 ? kk + n : kk);
}

std::optional<std::size_t> SpectralGrid::half_integer_slot(int j) const {
  if (!m_) return std::nullopt;
  const auto kk = static_cast<std::ptrdiff_t>(j) * *m_;
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  if (kk <= -half || kk >= half) return std::nullopt;
  return slot_of_wavenumber(kk);
}

SpectralGrid make_grid(std::size_t n, int m) { return SpectralGrid(n, m); }

ComplexField::ComplexField(SpectralGrid grid, Representation rep)
    : grid_(grid), values_(grid.size(), cplx{}), rep_(rep) {}

ComplexField::ComplexField(SpectralGrid grid, std::vector<cplx> values, Representation rep)
    : grid_(grid), values_(std::move(values)), rep_(rep) {
  if (values_.size() != grid_.size()) throw ConfigError("field size does not match its grid");
}

void ComplexField::require_compatible(const ComplexField& other) const {
  if (!(grid_ == other.grid_) || rep_ != other.rep_) {
    throw ConfigError("field arithmetic needs matching grids and representations");
  }
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_compatible(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

bool ComplexField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

}  // namespace nlslab
