#pragma once

#include <string>

#include "nlslab/grid.hpp"

namespace nlslab {

/// Physical samples to scaled Fourier coefficients
///   F_k = dx * sum_i f(x_i) e^{-i xi_k x_i},
/// the Riemann sum of the continuum transform at xi_k. The inverse is
/// f(x_i) = (1/L) sum_k F_k e^{i xi_k x_i}.
ComplexField to_fourier(const ComplexField& f);
ComplexField from_fourier(const ComplexField& F);

/// Same field in the requested representation (copy when it already is).
ComplexField as_physical(const ComplexField& f);
ComplexField as_frequency(const ComplexField& f);

/// e^{it d_xx}: Fourier multiplier e^{-it xi^2}. Returns the input's representation.
ComplexField free_propagate(const ComplexField& f, double t);

/// d_x^k: Fourier multiplier (i xi)^k. Returns the input's representation.
ComplexField spatial_derivative(const ComplexField& f, int k);

/// Box L^2 norm; either representation (Parseval in frequency).
double l2_norm(const ComplexField& f);
/// ||d^k f||_2.
double derivative_norm(const ComplexField& f, int k);
/// (sum_{j<=k} ||d^j f||_2^2)^{1/2}.
double sobolev_norm(const ComplexField& f, int k);

double lebesgue_sup(const ComplexField& f);
double lebesgue_l1(const ComplexField& f);

/// Share of ||f||_2^2 carried by the outer `edge` fraction of the box
/// (|x| > (1 - edge) L/2). Zero for the zero field.
double boundary_mass_fraction(const ComplexField& f, double edge = 0.1);

/// The field without its 4pi-periodic component: lattice modes k = 0 mod m
/// removed. Dirac-train waves are 4pi-periodic and fill the whole box by
/// design, so the boundary monitor looks only at what remains.
ComplexField aperiodic_part(const ComplexField& f);

inline constexpr double kBoundaryMassThreshold = 1e-6;

/// Throws BoundaryMassError when the aperiodic part of f exceeds the
/// threshold on the outer tenth of the box.
void require_boundary_mass(const ComplexField& f, const std::string& where,
                           double threshold = kBoundaryMassThreshold);

}  // namespace nlslab
