#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nlslab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Periodic sampling lattice on [-L/2, L/2).
///
/// The standard box has L = 4*pi*m for an integer box multiple m, so the
/// frequency lattice xi_k = 2*pi*k/L = k/(2m) contains every half-integer
/// j/2 with |j*m| < n/2 as the exact mode k = j*m. A grid built with an
/// arbitrary length (used for the outer domain of the pseudo-conformal
/// transform) has no box multiple and no exact half-integer modes.
class SpectralGrid {
 public:
  /// Standard box: n power of two (n >= 8), m >= 1.
  SpectralGrid(std::size_t n, int m);

  static SpectralGrid with_length(std::size_t n, double length);

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return dx_; }
  std::optional<int> box_multiple() const { return m_; }

  double x(std::size_t i) const { return -0.5 * length_ + static_cast<double>(i) * dx_; }
  std::vector<double> points() const;

  /// Signed wavenumber of storage slot k (FFT order): 0..n/2-1, -n/2..-1.
  std::ptrdiff_t wavenumber(std::size_t k) const {
    const auto kk = static_cast<std::ptrdiff_t>(k);
    const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
    return kk < half ? kk : kk - static_cast<std::ptrdiff_t>(n_);
  }
  double frequency(std::size_t k) const { return dxi_ * static_cast<double>(wavenumber(k)); }
  double frequency_spacing() const { return dxi_; }
  double nyquist() const { return dxi_ * static_cast<double>(n_ / 2); }

  /// Frequencies in storage order.
  std::vector<double> frequencies() const;
  /// Frequencies sorted ascending: {-n/2, ..., n/2-1} * dxi.
  std::vector<double> frequency_lattice() const;

  std::size_t slot_of_wavenumber(std::ptrdiff_t kk) const;

  /// Storage slot of the plane wave e^{ixj/2}, or nullopt when the grid has no
  /// box multiple or |j*m| reaches the Nyquist index.
  std::optional<std::size_t> half_integer_slot(int j) const;

  bool operator==(const SpectralGrid& other) const {
    return n_ == other.n_ && length_ == other.length_ && m_ == other.m_;
  }

 private:
  SpectralGrid(std::size_t n, double length, std::optional<int> m);

  std::size_t n_;
  double length_;
  double dx_;
  double dxi_;
  std::optional<int> m_;
};

/// Standard box grid; rejects n that is not a power of two >= 8, or m < 1.
SpectralGrid make_grid(std::size_t n, int m);

enum class Representation { physical, frequency };

/// Complex samples on a grid, either point values or scaled Fourier
/// coefficients (see to_fourier for the scaling).
class ComplexField {
 public:
  ComplexField(SpectralGrid grid, Representation rep);
  ComplexField(SpectralGrid grid, std::vector<cplx> values, Representation rep);

  static ComplexField zeros(const SpectralGrid& grid, Representation rep = Representation::physical) {
    return ComplexField(grid, rep);
  }

  template <class F>
  static ComplexField sample(const SpectralGrid& grid, F&& f) {
    ComplexField out(grid, Representation::physical);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.x(i));
    return out;
  }

  const SpectralGrid& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(cplx s);

  friend ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
  friend ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
  friend ComplexField operator*(cplx s, ComplexField a) { return a *= s; }

  bool all_finite() const;

 private:
  void require_compatible(const ComplexField& other) const;

  SpectralGrid grid_;
  std::vector<cplx> values_;
  Representation rep_;
};

}  // namespace nlslab
