#pragma once

#include <complex>
#include <span>

namespace nlslab {

// Hot loops in two builds: `serial` is the reference, `parallel` splits the
// outer index across OpenMP workers. Each output element is computed by the
// same instruction sequence in both, so results are bitwise equal.

namespace serial {

/// out[i] = sum_k amps[k] e^{i freqs[k] xs[i]}  (non-uniform trigonometric sum).
void trig_sum(std::span<const double> freqs, std::span<const std::complex<double>> amps,
              std::span<const double> xs, std::span<std::complex<double>> out);

/// v[i] *= e^{i c (|v[i]|^2 - 2M)}: exact flow of the cubic phase term.
void nonlinear_phase(std::span<std::complex<double>> v, double c, double M);

/// out[i] = sum_q weighted[q] e^{i (nodes[q] xs[i] - t nodes[q]^2)}: a quadrature
/// rule for the free evolution of a compactly supported Fourier profile.
void weighted_phase_sum(std::span<const double> nodes, std::span<const std::complex<double>> weighted,
                        std::span<const double> xs, double t, std::span<std::complex<double>> out);

}  // namespace serial

namespace parallel {

void trig_sum(std::span<const double> freqs, std::span<const std::complex<double>> amps,
              std::span<const double> xs, std::span<std::complex<double>> out);

void nonlinear_phase(std::span<std::complex<double>> v, double c, double M);

void weighted_phase_sum(std::span<const double> nodes, std::span<const std::complex<double>> weighted,
                        std::span<const double> xs, double t, std::span<std::complex<double>> out);

}  // namespace parallel

}  // namespace nlslab
