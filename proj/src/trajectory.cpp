#include "randhall/trajectory.hpp"

#include "randhall/errors.hpp"

#include <cmath>
#include <string>

namespace randhall {

std::vector<double> trapezoid_weights(const std::vector<double>& times, double horizon) {
  const std::size_t m = times.size();
  std::vector<double> w(m, 0.0);
  if (m == 0) return w;
  w.front() += times.front();
  w.back() += horizon - times.back();
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double h = times[j + 1] - times[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

Trajectory::Trajectory(std::vector<double> times, std::vector<SpectralField> fields, double horizon)
    : times_(std::move(times)), fields_(std::move(fields)), horizon_(horizon) {
  if (times_.size() != fields_.size()) throw StructuralError("trajectory: times and fields differ in length");
  if (times_.empty()) throw DomainError("trajectory: no samples");
  if (times_.front() < 0.0) throw DomainError("trajectory: negative sample time");
  for (std::size_t j = 1; j < times_.size(); ++j) {
    if (!(times_[j] > times_[j - 1])) throw DomainError("trajectory: sample times must increase strictly");
    require_same_grid(fields_[0].grid(), fields_[j].grid(), "trajectory");
  }
  if (horizon_ < times_.back()) throw DomainError("trajectory: horizon precedes the last sample");
  weights_ = trapezoid_weights(times_, horizon_);
}

std::vector<double> uniform_nodes(double horizon, int steps) { return graded_nodes(horizon, steps, 1.0); }

std::vector<double> graded_nodes(double horizon, int steps, double grading) {
  if (steps < 1) throw DomainError("time grid needs at least one step");
  if (!(horizon > 0.0)) throw DomainError("time horizon must be positive");
  if (!(grading >= 1.0)) throw DomainError("grading exponent must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) {
    t[j] = horizon * std::pow(static_cast<double>(j) / steps, grading);
  }
  t.back() = horizon;
  return t;
}

void require_same_nodes(const Trajectory& a, const Trajectory& b, const char* where) {
  if (a.times() != b.times()) throw StructuralError(std::string(where) + ": sample times differ");
  require_same_grid(a.field(0).grid(), b.field(0).grid(), where);
}

}  // namespace randhall
