#pragma once

#include "randhall/grid.hpp"

#include <Eigen/Core>

#include <array>

namespace randhall {

using Vector3c = Eigen::Matrix<Complex, 3, 1>;

/// Truncated Fourier series of a real vector field on the 3-torus:
/// f(x) = sum_k a_k e^{i k.x}, with a_{-k} = conj(a_k) and Nyquist rows held at zero.
///
/// The coefficient array is exposed for expression-style manipulation; helpers that write
/// single modes keep the Hermitian pairing intact.
class SpectralField {
 public:
  explicit SpectralField(GridPtr grid);
  SpectralField(GridPtr grid, Coefficients coeffs);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }

  const Coefficients& coeffs() const { return coeffs_; }
  Coefficients& coeffs() { return coeffs_; }

  Vector3c mode(const std::array<int, 3>& k) const;
  /// Sets a_k and a_{-k} = conj(a_k). For self-paired k only the real part is kept.
  void set_mode(const std::array<int, 3>& k, const Vector3c& a);

  bool is_zero_mean() const;
  /// |k.a_k| <= tol |a_k| |k| for every k != 0.
  bool is_div_free(double tol = 1e-12) const;
  bool is_hermitian(double tol = 0.0) const;
  /// True when no mode outside the two-thirds cube carries amplitude.
  bool is_dealiased() const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s) {
    coeffs_ *= s;
    return *this;
  }

 private:
  GridPtr grid_;
  Coefficients coeffs_;
};

inline SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
inline SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
inline SpectralField operator*(double s, SpectralField a) { return a *= s; }
inline SpectralField operator*(SpectralField a, double s) { return a *= s; }

/// Replaces each pair (a_k, a_{-k}) by its Hermitian average and zeroes Nyquist rows.
void enforce_hermitian(SpectralField& field);

/// Point values on the grid x_j = 2 pi j / N.
PhysicalField to_physical(const SpectralField& field);
SpectralField from_physical(const GridPtr& grid, const PhysicalField& values);

/// Real L^2 pairing with the normalized measure: <f, g> = sum_k Re(a_k . conj(b_k)).
double inner_product(const SpectralField& f, const SpectralField& g);

}  // namespace randhall
