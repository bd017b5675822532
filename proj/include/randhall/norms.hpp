#pragma once

#include "randhall/trajectory.hpp"

#include <limits>
#include <variant>
#include <vector>

namespace randhall {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// ||f||_{H^sigma}^2 = sum_k (1 + |k|^2)^sigma |a_k|^2.
struct SobolevNorm {
  double sigma = 0.0;
};

/// (avg_x |f(x)|^p)^{1/p} with |.| the Euclidean norm of the vector value; p may be infinite.
struct LebesgueNorm {
  double p = 2.0;
};

using SpaceNorm = std::variant<SobolevNorm, LebesgueNorm>;

/// (int_0^T || t^weight f(t) ||_space^time_exponent dt)^{1/time_exponent};
/// an infinite time exponent means the maximum over samples.
struct SpaceTimeNorm {
  double weight = 0.0;
  double time_exponent = 2.0;
  SpaceNorm space = LebesgueNorm{2.0};
};

using NormSpec = std::variant<SobolevNorm, LebesgueNorm, SpaceTimeNorm>;

double sobolev_norm(const SpectralField& field, double sigma);
double lp_norm(const SpectralField& field, double p);
/// Same as lp_norm on values already on the grid.
double lp_norm(const PhysicalField& values, double p);
double space_norm(const SpectralField& field, const SpaceNorm& norm);

/// Space norm of every sample of a trajectory.
std::vector<double> space_norms(const Trajectory& traj, const SpaceNorm& norm);

/// Weighted time norm of precomputed per-sample space norms.
double time_norm(const std::vector<double>& times, const std::vector<double>& weights,
                 const std::vector<double>& values, double weight, double time_exponent);

double weighted_spacetime_norm(const Trajectory& traj, const SpaceTimeNorm& spec);

/// Dispatches on the spec kind; the trajectory overload only accepts SpaceTimeNorm.
double evaluate_norm(const SpectralField& field, const NormSpec& spec);
double evaluate_norm(const Trajectory& traj, const NormSpec& spec);

/// Rejects specs outside sigma real, p in [1, inf], time exponent in (0, inf], weight >= 0.
void validate(const NormSpec& spec);

}  // namespace randhall
