#pragma once

#include <cstddef>
#include <vector>

namespace nlslab {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

inline constexpr std::size_t kGaussOrder = 16;

/// Composite 16-point Gauss-Legendre on [a, b] split into `panels` equal panels.
QuadratureRule gauss_legendre(double a, double b, std::size_t panels);

/// Appends the 16 nodes/weights of one panel [a, b] to `rule`.
void append_gauss_panel(QuadratureRule& rule, double a, double b);

}  // namespace nlslab
