#pragma once

#include <complex>
#include <cstddef>

namespace nlslab::fft {

// Unnormalised DFTs of length n, out-of-place or in-place (in == out).
// forward: X_k = sum_j x_j e^{-2 pi i jk/n}; backward uses e^{+...}.
// Plans are cached per length and shared across threads.
void forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);
void backward(const std::complex<double>* in, std::complex<double>* out, std::size_t n);

}  // namespace nlslab::fft
