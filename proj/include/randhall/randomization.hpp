#pragma once

#include "randhall/spectral_field.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace randhall {

enum class Distribution : std::uint32_t { Rademacher = 0, Gaussian = 1 };

std::string to_string(Distribution d);
Distribution parse_distribution(const std::string& name);

/// Stateless counter-based generator: every (key, counter) pair maps to a fixed 64-bit word,
/// so values can be produced in any order and from any thread.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key() const { return key_; }
  std::uint64_t bits(std::uint64_t counter) const;
  /// Uniform on the open interval (0, 1).
  double uniform(std::uint64_t counter) const;
  /// Standard normal by Box-Muller on the counters 2c and 2c + 1.
  double gaussian(std::uint64_t counter) const;
  double rademacher(std::uint64_t counter) const { return (bits(counter) >> 63) ? 1.0 : -1.0; }
  double sample(Distribution d, std::uint64_t counter) const {
    return d == Distribution::Gaussian ? gaussian(counter) : rademacher(counter);
  }

  /// Independent child stream.
  CounterRng split(std::uint64_t stream) const;

 private:
  std::uint64_t key_;
};

/// Seed of ensemble member `index`, a pure function of (base, index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// One realization of the multipliers l_k, symmetrized so that l_{-k} = l_k.
struct RandomDraw {
  std::uint64_t seed = 0;
  Distribution distribution = Distribution::Gaussian;
  GridPtr grid;
  bool per_component = false;
  /// Multiplier per storage index and component; the three columns coincide unless per_component.
  Eigen::Array<double, Eigen::Dynamic, 3> values;
};

RandomDraw draw(std::uint64_t seed, Distribution distribution, const GridPtr& grid, bool per_component = false);

/// The draw with every multiplier equal to one.
RandomDraw identity_draw(const GridPtr& grid);

/// a_k -> l_k a_k. Throws StructuralError on grid mismatch.
SpectralField randomize(const SpectralField& field, const RandomDraw& d);

struct MomentReport {
  double q = 2.0;
  /// Monte Carlo estimate of (E |sum_i c_i l_i|^q)^{1/q}.
  double empirical_norm = 0.0;
  /// empirical_norm / (sqrt(q) ||c||_2).
  double bound_ratio = 0.0;
};

/// L^q(Omega) norms of sum_i c_i l_i for every q in `orders`, all from the same samples.
std::vector<MomentReport> moment_check(std::span<const double> c, std::span<const double> orders,
                                       std::size_t n_samples, std::uint64_t seed, Distribution distribution);

MomentReport moment_check(std::span<const double> c, double q, std::size_t n_samples, std::uint64_t seed,
                          Distribution distribution);

}  // namespace randhall
