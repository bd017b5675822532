#pragma once

#include <Eigen/Core>

#include <array>
#include <complex>
#include <memory>

namespace randhall {

using Complex = std::complex<double>;

/// Fourier coefficients of a 3-vector field, one column per component, rows in grid storage order.
using Coefficients = Eigen::Array<Complex, Eigen::Dynamic, 3>;

/// Point values of a 3-vector field on the uniform physical grid, one column per component.
using PhysicalField = Eigen::Array<double, Eigen::Dynamic, 3>;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Cubic Fourier lattice on [0, 2pi)^3 with N modes per dimension.
///
/// Storage follows the FFT convention: row-major (i0, i1, i2), i2 fastest, where index i
/// stands for wavenumber i for i < N/2 and i - N otherwise. The unpaired Nyquist
/// wavenumber -N/2 is carried in storage but always held at zero amplitude.
/// Grids are shared and immutable; `make` returns the same instance for the same N.
class Grid {
 public:
  static GridPtr make(int n);

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  int n() const { return n_; }
  Eigen::Index size() const { return size_; }

  int wavenumber(int i) const { return i < n_ / 2 ? i : i - n_; }
  int storage_index(int k) const { return k >= 0 ? k : k + n_; }

  Eigen::Index index(int k0, int k1, int k2) const {
    return (static_cast<Eigen::Index>(storage_index(k0)) * n_ + storage_index(k1)) * n_ +
           storage_index(k2);
  }
  Eigen::Index index(const std::array<int, 3>& k) const { return index(k[0], k[1], k[2]); }
  std::array<int, 3> wavevector(Eigen::Index idx) const;

  /// Storage index of -k. Nyquist rows map onto themselves.
  Eigen::Index mirror(Eigen::Index idx) const { return mirror_(idx); }

  const Eigen::ArrayXd& k(int d) const { return k_[d]; }
  const Eigen::ArrayXd& k_squared() const { return k2_; }
  /// |k|^2 as an integer, for tables indexed by shell.
  const Eigen::ArrayXi& k_squared_int() const { return k2_int_; }
  int max_k_squared() const { return max_k2_; }

  /// Spreads a radial profile over the lattice: out(i) = profile(|k_i|^2), evaluated once per shell.
  template <typename F>
  Eigen::ArrayXd radial(F&& profile) const {
    Eigen::ArrayXd shell(max_k2_ + 1);
    for (int s = 0; s <= max_k2_; ++s) shell(s) = profile(static_cast<double>(s));
    return k2_int_.unaryExpr([&shell](int s) { return shell(s); });
  }

  /// 1 on ordinary modes, 0 on any mode with a Nyquist component.
  const Eigen::ArrayXd& nyquist_mask() const { return nyquist_mask_; }
  /// 1 where every |k_i| <= c = (N - 1)/3, 0 elsewhere. Since 3c < N, products of two such
  /// fields alias only onto discarded modes.
  const Eigen::ArrayXd& dealias_mask() const { return dealias_mask_; }
  int dealias_cutoff() const { return (n_ - 1) / 3; }

  /// Unnormalized synthesis f(x_j) = sum_k a_k e^{i k.x_j} for one Hermitian component.
  void synthesize(const Complex* coeffs, double* values) const;
  /// Analysis a_k = N^-3 sum_j f(x_j) e^{-i k.x_j}; output is exactly Hermitian with Nyquist rows zeroed.
  void analyze(const double* values, Complex* coeffs) const;

 private:
  explicit Grid(int n);

  struct Plans;

  int n_;
  Eigen::Index size_;
  std::array<Eigen::ArrayXd, 3> k_;
  Eigen::ArrayXd k2_;
  Eigen::ArrayXi k2_int_;
  int max_k2_ = 0;
  Eigen::ArrayXd nyquist_mask_;
  Eigen::ArrayXd dealias_mask_;
  Eigen::Array<Eigen::Index, Eigen::Dynamic, 1> mirror_;
  std::unique_ptr<Plans> plans_;
};

/// Throws StructuralError unless both grids have the same resolution.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace randhall
