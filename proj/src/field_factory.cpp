#include "randhall/field_factory.hpp"

#include "randhall/errors.hpp"
#include "randhall/norms.hpp"
#include "randhall/operators.hpp"
#include "randhall/randomization.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <numbers>

namespace randhall {

namespace {

// Orthonormal pair spanning the plane perpendicular to k.
std::pair<Eigen::Vector3d, Eigen::Vector3d> transverse_basis(const std::array<int, 3>& k) {
  const Eigen::Vector3d kv(k[0], k[1], k[2]);
  const Eigen::Vector3d khat = kv.normalized();
  const Eigen::Vector3d seed = std::abs(khat.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d e1 = (seed - khat * khat.dot(seed)).normalized();
  const Eigen::Vector3d e2 = khat.cross(e1);
  return {e1, e2};
}

bool is_canonical(const Grid& g, Eigen::Index idx) { return idx < g.mirror(idx); }

bool in_ball(const Grid& g, Eigen::Index idx, double radius) {
  const double k2 = g.k_squared()(idx);
  return k2 > 0.0 && k2 <= radius * radius + 1e-9 && g.nyquist_mask()(idx) != 0.0 && g.dealias_mask()(idx) != 0.0;
}

}  // namespace

SpectralField single_mode(const GridPtr& grid, const std::array<int, 3>& k, const Vector3c& a) {
  SpectralField f(grid);
  f.set_mode(k, a);
  return f;
}

SpectralField random_solenoidal(const GridPtr& grid, std::uint64_t seed, double radius) {
  const Grid& g = *grid;
  SpectralField f(grid);
  const CounterRng rng(seed);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!is_canonical(g, i) || !in_ball(g, i, radius)) continue;
    const auto k = g.wavevector(i);
    const auto [e1, e2] = transverse_basis(k);
    const auto base = static_cast<std::uint64_t>(4 * i);
    const Complex c1(rng.gaussian(base), rng.gaussian(base + 1));
    const Complex c2(rng.gaussian(base + 2), rng.gaussian(base + 3));
    const Vector3c a = c1 * e1.cast<Complex>() + c2 * e2.cast<Complex>();
    f.set_mode(k, a);
  }
  const double norm = sobolev_norm(f, 0.0);
  if (norm > 0.0) f *= 1.0 / norm;
  return f;
}

SpectralField power_law_field(const GridPtr& grid, double s, double amplitude, double radius,
                              std::uint64_t direction_seed) {
  const Grid& g = *grid;
  if (radius <= 0.0) radius = g.dealias_cutoff();
  SpectralField f(grid);
  const CounterRng rng(direction_seed);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!is_canonical(g, i) || !in_ball(g, i, radius)) continue;
    const auto k = g.wavevector(i);
    const auto [e1, e2] = transverse_basis(k);
    const double angle = 2.0 * std::numbers::pi * rng.uniform(2 * static_cast<std::uint64_t>(i));
    const double phase = 2.0 * std::numbers::pi * rng.uniform(2 * static_cast<std::uint64_t>(i) + 1);
    const Eigen::Vector3d dir = std::cos(angle) * e1 + std::sin(angle) * e2;
    const double modulus = amplitude * std::pow(1.0 + g.k_squared()(i), -(s + 1.5) / 2.0);
    f.set_mode(k, std::polar(modulus, phase) * dir.cast<Complex>());
  }
  return f;
}

SpectralField beltrami_field(const GridPtr& grid, int shell) {
  const Grid& g = *grid;
  SpectralField f(grid);
  const Complex i_unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.k_squared_int()(i) != shell || !is_canonical(g, i) || g.nyquist_mask()(i) == 0.0) continue;
    const auto k = g.wavevector(i);
    const auto [e1, e2] = transverse_basis(k);
    // i k x (e1 + i e2) = |k| (e1 + i e2) because khat x e1 = e2 and khat x e2 = -e1.
    const Vector3c a = (e1.cast<Complex>() + i_unit * e2.cast<Complex>()) / std::sqrt(2.0);
    f.set_mode(k, a);
  }
  if (f.coeffs().abs2().sum() == 0.0) throw DomainError("beltrami_field: empty shell");
  return f;
}

SpectralField shear_flow(const GridPtr& grid, std::uint64_t seed, double radius) {
  const Grid& g = *grid;
  SpectralField f(grid);
  const CounterRng rng(seed);
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g.k(0)(i) != 0.0 || !is_canonical(g, i) || !in_ball(g, i, radius)) continue;
    const Complex c(rng.gaussian(2 * i), rng.gaussian(2 * i + 1));
    f.set_mode(g.wavevector(i), Vector3c(c, 0.0, 0.0));
  }
  const double norm = sobolev_norm(f, 0.0);
  if (norm > 0.0) f *= 1.0 / norm;
  return f;
}

}  // namespace randhall
