#include "nlslab/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "nlslab/threads.hpp"

namespace nlslab {

namespace {

using cplx = std::complex<double>;

inline cplx trig_sum_at(std::span<const double> freqs, std::span<const cplx> amps, double x) {
  cplx acc{};
  for (std::size_t k = 0; k < freqs.size(); ++k) acc += amps[k] * std::polar(1.0, freqs[k] * x);
  return acc;
}

inline cplx phase_sum_at(std::span<const double> nodes, std::span<const cplx> weighted, double x, double t) {
  cplx acc{};
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double xi = nodes[q];
    acc += weighted[q] * std::polar(1.0, xi * x - t * xi * xi);
  }
  return acc;
}

inline void phase_at(cplx& v, double c, double M) { v *= std::polar(1.0, c * (std::norm(v) - 2.0 * M)); }

void check_sizes(std::size_t a, std::size_t b, std::size_t x, std::size_t o) {
  if (a != b || x != o) throw std::invalid_argument("kernel span sizes disagree");
}

}  // namespace

namespace serial {

void trig_sum(std::span<const double> freqs, std::span<const cplx> amps, std::span<const double> xs,
              std::span<cplx> out) {
  check_sizes(freqs.size(), amps.size(), xs.size(), out.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = trig_sum_at(freqs, amps, xs[i]);
}

void nonlinear_phase(std::span<cplx> v, double c, double M) {
  for (auto& z : v) phase_at(z, c, M);
}

void weighted_phase_sum(std::span<const double> nodes, std::span<const cplx> weighted, std::span<const double> xs,
                        double t, std::span<cplx> out) {
  check_sizes(nodes.size(), weighted.size(), xs.size(), out.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = phase_sum_at(nodes, weighted, xs[i], t);
}

}  // namespace serial

namespace parallel {

void trig_sum(std::span<const double> freqs, std::span<const cplx> amps, std::span<const double> xs,
              std::span<cplx> out) {
  check_sizes(freqs.size(), amps.size(), xs.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = trig_sum_at(freqs, amps, xs[i]);
}

void nonlinear_phase(std::span<cplx> v, double c, double M) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  // Too little work per element to pay for a team below this size.
#pragma omp parallel for schedule(static) num_threads(worker_count()) if (n >= 32768)
  for (std::ptrdiff_t i = 0; i < n; ++i) phase_at(v[i], c, M);
}

void weighted_phase_sum(std::span<const double> nodes, std::span<const cplx> weighted, std::span<const double> xs,
                        double t, std::span<cplx> out) {
  check_sizes(nodes.size(), weighted.size(), xs.size(), out.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = phase_sum_at(nodes, weighted, xs[i], t);
}

}  // namespace parallel

}  // namespace nlslab
