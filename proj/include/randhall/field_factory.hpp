#pragma once

#include "randhall/spectral_field.hpp"

#include <cstdint>

namespace randhall {

/// Single Fourier pair +-k with coefficient a (a_{-k} = conj(a)).
SpectralField single_mode(const GridPtr& grid, const std::array<int, 3>& k, const Vector3c& a);

/// Divergence-free field with independent Gaussian coefficients on 0 < |k| <= radius,
/// scaled to unit L^2 norm. Deterministic in `seed`.
SpectralField random_solenoidal(const GridPtr& grid, std::uint64_t seed, double radius);

/// Divergence-free field with |a_k| = amplitude (1 + |k|^2)^{-(s + 3/2)/2} on 0 < |k| <= radius
/// (radius <= 0 selects the two-thirds cutoff). Polarizations are drawn from `direction_seed`
/// and do not affect any norm.
SpectralField power_law_field(const GridPtr& grid, double s, double amplitude, double radius,
                              std::uint64_t direction_seed = 0);

/// Positive-helicity eigenfield of the curl, curl B = |k| B, built from every lattice vector
/// on the shell |k|^2 = shell with unit-modulus coefficients.
SpectralField beltrami_field(const GridPtr& grid, int shell);

/// Unidirectional shear u = (U(x_2, x_3), 0, 0) with Gaussian coefficients on 0 < |k| <= radius.
/// (u.grad)u vanishes identically for such fields.
SpectralField shear_flow(const GridPtr& grid, std::uint64_t seed, double radius);

}  // namespace randhall
