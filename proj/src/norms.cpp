#include "randhall/norms.hpp"

#include "randhall/errors.hpp"

#include <cmath>

namespace randhall {

double sobolev_norm(const SpectralField& field, double sigma) {
  const Eigen::ArrayXd power = field.coeffs().abs2().rowwise().sum();
  if (sigma == 0.0) return std::sqrt(power.sum());
  const Eigen::ArrayXd weight = field.grid().radial([sigma](double k2) { return std::pow(1.0 + k2, sigma); });
  return std::sqrt((weight * power).sum());
}

double lp_norm(const PhysicalField& values, double p) {
  if (!(p >= 1.0)) throw DomainError("Lebesgue exponent must be >= 1");
  const Eigen::ArrayXd magnitude = values.square().rowwise().sum().sqrt();
  if (std::isinf(p)) return magnitude.size() ? magnitude.maxCoeff() : 0.0;
  const double count = static_cast<double>(magnitude.size());
  if (p == 2.0) return std::sqrt(magnitude.square().sum() / count);
  // Rescale by the maximum so that large p does not overflow.
  const double peak = magnitude.maxCoeff();
  if (peak == 0.0) return 0.0;
  const Eigen::ArrayXd scaled = magnitude / peak;
  double total = 0.0;
  if (p == std::floor(p) && p <= 64.0) {
    // Integer exponents by repeated squaring; much cheaper than pow per point.
    const auto n = static_cast<unsigned>(p);
    for (const double v : scaled) {
      double base = v, acc = 1.0;
      for (unsigned e = n; e; e >>= 1) {
        if (e & 1u) acc *= base;
        base *= base;
      }
      total += acc;
    }
  } else {
    total = scaled.pow(p).sum();
  }
  return peak * std::pow(total / count, 1.0 / p);
}

double lp_norm(const SpectralField& field, double p) {
  if (!(p >= 1.0)) throw DomainError("Lebesgue exponent must be >= 1");
  return lp_norm(to_physical(field), p);
}

double space_norm(const SpectralField& field, const SpaceNorm& norm) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SobolevNorm>) {
          return sobolev_norm(field, n.sigma);
        } else {
          return lp_norm(field, n.p);
        }
      },
      norm);
}

std::vector<double> space_norms(const Trajectory& traj, const SpaceNorm& norm) {
  std::vector<double> out(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j) out[j] = space_norm(traj.field(j), norm);
  return out;
}

double time_norm(const std::vector<double>& times, const std::vector<double>& weights,
                 const std::vector<double>& values, double weight, double time_exponent) {
  if (values.empty()) throw DomainError("time norm of an empty trajectory");
  if (!(time_exponent > 0.0)) throw DomainError("time exponent must be positive");
  if (weight < 0.0) throw DomainError("time weight exponent must be nonnegative");
  auto weighted = [&](std::size_t j) {
    if (values[j] == 0.0) return 0.0;
    return weight == 0.0 ? values[j] : std::pow(times[j], weight) * values[j];
  };
  if (std::isinf(time_exponent)) {
    double m = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) m = std::max(m, weighted(j));
    return m;
  }
  double peak = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) peak = std::max(peak, weighted(j));
  if (peak == 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) acc += weights[j] * std::pow(weighted(j) / peak, time_exponent);
  return peak * std::pow(acc, 1.0 / time_exponent);
}

double weighted_spacetime_norm(const Trajectory& traj, const SpaceTimeNorm& spec) {
  if (traj.empty()) throw DomainError("weighted_spacetime_norm: empty trajectory");
  return time_norm(traj.times(), traj.weights(), space_norms(traj, spec.space), spec.weight, spec.time_exponent);
}

double evaluate_norm(const SpectralField& field, const NormSpec& spec) {
  validate(spec);
  if (const auto* s = std::get_if<SobolevNorm>(&spec)) return sobolev_norm(field, s->sigma);
  if (const auto* l = std::get_if<LebesgueNorm>(&spec)) return lp_norm(field, l->p);
  throw DomainError("space-time norm requested for a single field");
}

double evaluate_norm(const Trajectory& traj, const NormSpec& spec) {
  validate(spec);
  if (const auto* st = std::get_if<SpaceTimeNorm>(&spec)) return weighted_spacetime_norm(traj, *st);
  throw DomainError("space-only norm requested for a trajectory");
}

void validate(const NormSpec& spec) {
  auto check_space = [](const SpaceNorm& s) {
    if (const auto* l = std::get_if<LebesgueNorm>(&s); l && !(l->p >= 1.0)) {
      throw DomainError("Lebesgue exponent must be >= 1");
    }
    if (const auto* h = std::get_if<SobolevNorm>(&s); h && !std::isfinite(h->sigma)) {
      throw DomainError("Sobolev index must be finite");
    }
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, SpaceTimeNorm>) {
          if (!(n.time_exponent > 0.0)) throw DomainError("time exponent must be positive");
          if (!(n.weight >= 0.0)) throw DomainError("time weight exponent must be nonnegative");
          check_space(n.space);
        } else {
          check_space(SpaceNorm{n});
        }
      },
      spec);
}

}  // namespace randhall
