#include "randhall/spectral_field.hpp"

#include "randhall/errors.hpp"

namespace randhall {

SpectralField::SpectralField(GridPtr grid) : grid_(std::move(grid)) {
  coeffs_ = Coefficients::Zero(grid_->size(), 3);
}

SpectralField::SpectralField(GridPtr grid, Coefficients coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.rows() != grid_->size()) {
    throw StructuralError("coefficient array does not match grid size");
  }
}

Vector3c SpectralField::mode(const std::array<int, 3>& k) const {
  return coeffs_.row(grid_->index(k)).matrix().transpose();
}

void SpectralField::set_mode(const std::array<int, 3>& k, const Vector3c& a) {
  const Eigen::Index idx = grid_->index(k);
  if (grid_->nyquist_mask()(idx) == 0.0) {
    throw DomainError("cannot excite a Nyquist mode");
  }
  const Eigen::Index mir = grid_->mirror(idx);
  if (mir == idx) {
    coeffs_.row(idx) = a.real().cast<Complex>().transpose().array();
    return;
  }
  coeffs_.row(idx) = a.transpose().array();
  coeffs_.row(mir) = a.conjugate().transpose().array();
}

bool SpectralField::is_zero_mean() const { return (coeffs_.row(0) == Complex(0.0)).all(); }

bool SpectralField::is_div_free(double tol) const {
  const Grid& g = *grid_;
  for (Eigen::Index i = 1; i < g.size(); ++i) {
    const Complex div = g.k(0)(i) * coeffs_(i, 0) + g.k(1)(i) * coeffs_(i, 1) + g.k(2)(i) * coeffs_(i, 2);
    const double amp = coeffs_.row(i).matrix().norm();
    if (std::abs(div) > tol * amp * std::sqrt(g.k_squared()(i))) return false;
  }
  return true;
}

bool SpectralField::is_hermitian(double tol) const {
  const Grid& g = *grid_;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Eigen::Index m = g.mirror(i);
    for (int c = 0; c < 3; ++c) {
      if (std::abs(coeffs_(i, c) - std::conj(coeffs_(m, c))) > tol) return false;
    }
    if (g.nyquist_mask()(i) == 0.0 && (coeffs_.row(i) != Complex(0.0)).any()) return false;
  }
  return true;
}

bool SpectralField::is_dealiased() const {
  const auto& mask = grid_->dealias_mask();
  for (Eigen::Index i = 0; i < grid_->size(); ++i) {
    if (mask(i) == 0.0 && (coeffs_.row(i) != Complex(0.0)).any()) return false;
  }
  return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*grid_, other.grid(), "field addition");
  coeffs_ += other.coeffs_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*grid_, other.grid(), "field subtraction");
  coeffs_ -= other.coeffs_;
  return *this;
}

void enforce_hermitian(SpectralField& field) {
  const Grid& g = field.grid();
  Coefficients& a = field.coeffs();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const Eigen::Index m = g.mirror(i);
    if (m < i) continue;
    for (int c = 0; c < 3; ++c) {
      const Complex avg = 0.5 * (a(i, c) + std::conj(a(m, c)));
      a(i, c) = avg;
      a(m, c) = std::conj(avg);
    }
  }
  for (int c = 0; c < 3; ++c) a.col(c) *= g.nyquist_mask();
}

PhysicalField to_physical(const SpectralField& field) {
  const Grid& g = field.grid();
  PhysicalField values(g.size(), 3);
  for (int c = 0; c < 3; ++c) g.synthesize(field.coeffs().col(c).data(), values.col(c).data());
  return values;
}

SpectralField from_physical(const GridPtr& grid, const PhysicalField& values) {
  if (values.rows() != grid->size()) throw StructuralError("physical array does not match grid size");
  SpectralField field(grid);
  for (int c = 0; c < 3; ++c) grid->analyze(values.col(c).data(), field.coeffs().col(c).data());
  return field;
}

double inner_product(const SpectralField& f, const SpectralField& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return (f.coeffs() * g.coeffs().conjugate()).real().sum();
}

}  // namespace randhall
