#include "randhall/semigroup.hpp"

#include "randhall/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

namespace randhall {

SpectralField propagate(const SpectralField& field, double t, double alpha) {
  if (t < 0.0) throw DomainError("propagate: negative time");
  SpectralField out(field.grid_ptr());
  if (t == 0.0) {
    out.coeffs() = field.coeffs();
    return out;
  }
  const Eigen::ArrayXd decay = field.grid().radial([t, alpha](double k2) { return std::exp(-t * std::pow(k2, alpha)); });
  for (int c = 0; c < 3; ++c) out.coeffs().col(c) = field.coeffs().col(c) * decay;
  return out;
}

namespace {

void validate_query(const KernelQuery& q) {
  if (!(q.alpha > 0.0)) throw DomainError("kernel_norm: alpha must be positive");
  if (!(q.p > 0.0)) throw DomainError("kernel_norm: p must be positive");
  if (!(q.t > 0.0)) throw DomainError("kernel_norm: t must be positive");
  if (q.dimension < 1) throw DomainError("kernel_norm: dimension must be positive");
  if (q.p * q.m <= -q.dimension) throw DomainError("kernel_norm: integrand diverges at the origin (p m <= -n)");
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace

double kernel_scaling_exponent(const KernelQuery& q) {
  return -q.m / (2.0 * q.alpha) - q.dimension / (2.0 * q.p * q.alpha);
}

double kernel_norm(const KernelQuery& q) {
  validate_query(q);
  const double radial_power = q.p * q.m + q.dimension - 1;
  const double rate = q.p * q.t;
  auto integrand = [&](double r) {
    const double e = rate * std::pow(r, 2.0 * q.alpha);
    if (e > 745.0) return 0.0;
    return std::exp(-e) * std::pow(r, radial_power);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double integral = integrator.integrate(integrand, 1e-13, &error, &l1);
  return std::pow(sphere_area(q.dimension) * integral, 1.0 / q.p);
}

double lattice_kernel_norm(const KernelQuery& q) {
  validate_query(q);
  if (q.dimension != 3) throw DomainError("lattice_kernel_norm is implemented for n = 3");
  const double rate = q.p * q.t;
  const double power = q.p * q.m;
  // Terms beyond radius R are below e^{-rate R^{2 alpha}} R^{power}; 40 e-folds past the peak suffice.
  const double peak = power > 0.0 ? std::pow(power / (2.0 * q.alpha * rate), 1.0 / (2.0 * q.alpha)) : 0.0;
  const double tail = std::pow(40.0 / rate, 1.0 / (2.0 * q.alpha));
  const int radius = static_cast<int>(std::ceil(2.0 * peak + tail)) + 1;
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      for (int k = -radius; k <= radius; ++k) {
        const double k2 = static_cast<double>(i * i + j * j + k * k);
        if (k2 == 0.0) {
          if (power == 0.0) sum += 1.0;
          continue;
        }
        const double kn = std::sqrt(k2);
        sum += std::exp(-rate * std::pow(kn, 2.0 * q.alpha)) * std::pow(kn, power);
      }
    }
  }
  return std::pow(sum, 1.0 / q.p);
}

double beta_time_integral(double r, double s, double t) {
  if (!(r > 0.0 && r < 1.0) || !(s > 0.0 && s < 1.0)) {
    throw DomainError("beta_time_integral: exponents must lie in (0, 1)");
  }
  if (!(t > 0.0)) throw DomainError("beta_time_integral: t must be positive");
  // Split at 1/2 so each half carries its singularity at the origin, where the nodes are exact.
  auto left = [&](double x) { return std::pow(x, -s) * std::pow(1.0 - x, -r); };
  auto right = [&](double x) { return std::pow(x, -r) * std::pow(1.0 - x, -s); };
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double unit = integrator.integrate(left, 0.0, 0.5, 1e-14) + integrator.integrate(right, 0.0, 0.5, 1e-14);
  const double exponent = 1.0 - r - s;
  return exponent == 0.0 ? unit : std::pow(t, exponent) * unit;
}

}  // namespace randhall
