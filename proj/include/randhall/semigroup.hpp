#pragma once

#include "randhall/spectral_field.hpp"

namespace randhall {

/// e^{-t (-Delta)^alpha}: a_k -> e^{-t |k|^{2 alpha}} a_k. Throws DomainError for t < 0.
SpectralField propagate(const SpectralField& field, double t, double alpha);

/// Parameters of || e^{-t|xi|^{2 alpha}} |xi|^m ||_{L^p_xi}.
struct KernelQuery {
  double alpha = 1.0;
  double m = 0.0;
  double p = 2.0;
  int dimension = 3;
  double t = 1.0;
};

/// L^p norm over R^n of the weighted semigroup symbol, by adaptive radial quadrature.
double kernel_norm(const KernelQuery& q);

/// The same norm with the integral replaced by the lattice sum over Z^n (n = 3),
/// truncated where terms fall below double precision relative to the partial sum.
double lattice_kernel_norm(const KernelQuery& q);

/// Exponent e with kernel_norm(t) = t^e kernel_norm(1): -m/(2 alpha) - n/(2 p alpha).
double kernel_scaling_exponent(const KernelQuery& q);

/// int_0^t (t - tau)^{-r} tau^{-s} d tau for 0 < r, s < 1, evaluated on the unit interval
/// after tau = t sigma and rescaled by t^{1-r-s}.
double beta_time_integral(double r, double s, double t);

}  // namespace randhall
