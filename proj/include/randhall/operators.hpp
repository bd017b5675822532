#pragma once

#include "randhall/spectral_field.hpp"

namespace randhall {

/// a_k -> a_k - k (k.a_k) / |k|^2 for k != 0; the mean mode passes through.
SpectralField leray_project(const SpectralField& field);

/// Zeroes every mode with some |k_i| above the two-thirds cutoff.
SpectralField dealias(const SpectralField& field);
void dealias_in_place(SpectralField& field);

SpectralField curl(const SpectralField& field);

/// Componentwise partial derivative along axis d.
SpectralField partial(const SpectralField& field, int d);

/// (-Delta)^alpha: a_k -> |k|^{2 alpha} a_k.
SpectralField fractional_laplacian(const SpectralField& field, double alpha);

/// Coefficients k.a_k of the divergence, scaled by i; zero for divergence-free fields.
Eigen::ArrayXcd divergence_coefficients(const SpectralField& field);

/// Rescales x -> lambda x for integer lambda: the mode k of the input becomes the mode
/// lambda k of the output, which lives on the grid with lambda N points per dimension.
SpectralField dilate(const SpectralField& field, int lambda);

}  // namespace randhall
