#pragma once

#include "randhall/spectral_field.hpp"

#include <vector>

namespace randhall {

/// Time samples of a field on [0, T] together with quadrature weights for time integrals.
///
/// Weights are the composite trapezoid rule on the sample nodes; the stretches [0, t_0] and
/// [t_last, T] are assigned to the end samples, so the weights always sum to the horizon T.
class Trajectory {
 public:
  Trajectory(std::vector<double> times, std::vector<SpectralField> fields, double horizon);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  double horizon() const { return horizon_; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<SpectralField>& fields() const { return fields_; }
  std::vector<SpectralField>& fields() { return fields_; }

  double time(std::size_t j) const { return times_[j]; }
  const SpectralField& field(std::size_t j) const { return fields_[j]; }
  const GridPtr& grid_ptr() const { return fields_.front().grid_ptr(); }

 private:
  std::vector<double> times_;
  std::vector<SpectralField> fields_;
  std::vector<double> weights_;
  double horizon_;
};

/// Trapezoid weights on `times` extended to cover [0, horizon].
std::vector<double> trapezoid_weights(const std::vector<double>& times, double horizon);

/// M + 1 equispaced nodes 0 = t_0 < ... < t_M = T.
std::vector<double> uniform_nodes(double horizon, int steps);

/// M + 1 nodes t_j = T (j / M)^grading, clustered near t = 0 for grading > 1.
std::vector<double> graded_nodes(double horizon, int steps, double grading);

/// Throws StructuralError unless both trajectories share sample times and grid.
void require_same_nodes(const Trajectory& a, const Trajectory& b, const char* where);

}  // namespace randhall
