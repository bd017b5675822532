#include "randhall/operators.hpp"

#include "randhall/errors.hpp"

#include <cmath>

namespace randhall {

namespace {
const Complex kI(0.0, 1.0);
}

SpectralField leray_project(const SpectralField& field) {
  const Grid& g = field.grid();
  const Coefficients& a = field.coeffs();
  const Eigen::ArrayXcd kdota = g.k(0) * a.col(0) + g.k(1) * a.col(1) + g.k(2) * a.col(2);
  const Eigen::ArrayXd inv_k2 = (g.k_squared() > 0.0).select(g.k_squared().inverse(), 0.0);
  const Eigen::ArrayXcd factor = kdota * inv_k2;
  SpectralField out(field.grid_ptr());
  for (int d = 0; d < 3; ++d) out.coeffs().col(d) = a.col(d) - g.k(d) * factor;
  return out;
}

void dealias_in_place(SpectralField& field) {
  const Eigen::ArrayXd& mask = field.grid().dealias_mask();
  for (int c = 0; c < 3; ++c) field.coeffs().col(c) *= mask;
}

SpectralField dealias(const SpectralField& field) {
  SpectralField out = field;
  dealias_in_place(out);
  return out;
}

SpectralField curl(const SpectralField& field) {
  const Grid& g = field.grid();
  const Coefficients& a = field.coeffs();
  SpectralField out(field.grid_ptr());
  out.coeffs().col(0) = kI * (g.k(1) * a.col(2) - g.k(2) * a.col(1));
  out.coeffs().col(1) = kI * (g.k(2) * a.col(0) - g.k(0) * a.col(2));
  out.coeffs().col(2) = kI * (g.k(0) * a.col(1) - g.k(1) * a.col(0));
  return out;
}

SpectralField partial(const SpectralField& field, int d) {
  SpectralField out(field.grid_ptr());
  out.coeffs() = field.coeffs().colwise() * (kI * field.grid().k(d));
  return out;
}

SpectralField fractional_laplacian(const SpectralField& field, double alpha) {
  SpectralField out(field.grid_ptr());
  const Eigen::ArrayXd symbol = field.grid().radial([alpha](double k2) { return std::pow(k2, alpha); });
  for (int c = 0; c < 3; ++c) out.coeffs().col(c) = field.coeffs().col(c) * symbol;
  return out;
}

Eigen::ArrayXcd divergence_coefficients(const SpectralField& field) {
  const Grid& g = field.grid();
  const Coefficients& a = field.coeffs();
  return g.k(0) * a.col(0) + g.k(1) * a.col(1) + g.k(2) * a.col(2);
}

SpectralField dilate(const SpectralField& field, int lambda) {
  if (lambda < 1) throw DomainError("dilation factor must be a positive integer");
  const Grid& g = field.grid();
  SpectralField out(Grid::make(g.n() * lambda));
  const Grid& h = out.grid();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.nyquist_mask()(i) == 0.0) continue;
    const auto k = g.wavevector(i);
    out.coeffs().row(h.index(lambda * k[0], lambda * k[1], lambda * k[2])) = field.coeffs().row(i);
  }
  return out;
}

}  // namespace randhall
