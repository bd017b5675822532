#pragma once

#include "randhall/dynamics.hpp"
#include "randhall/randomization.hpp"

#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace randhall::app {

/// Malformed or inconsistent experiment document; nothing has been computed yet.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemSection {
  SystemKind kind;
  bool static_flow = false;
};

struct GridSection {
  int n = 32;
};

/// Power-law data |a_k| = amplitude (1 + |k|^2)^{-(s + 3/2)/2}, randomized with `distribution`.
struct DataSection {
  double s = 0.0;
  double amplitude = 0.0;
  /// Velocity amplitude for hall_mhd; defaults to `amplitude`.
  double velocity_amplitude = 0.0;
  /// Spectral support radius; 0 selects the dealiasing cutoff.
  double radius = 0.0;
  std::uint64_t seed = 1;
  Distribution distribution = Distribution::Gaussian;
};

/// Lebesgue indices; "auto" picks the index putting beta (gamma) at half its supremum.
struct ExponentSection {
  double p = 0.0;
  double q = 0.0;
  bool p_auto = true;
  bool q_auto = true;
  std::optional<double> beta;
  std::optional<double> gamma;
};

struct TimeSection {
  double horizon = 0.01;
  int nodes = 32;
  bool graded = true;
  double grading = 2.0;
  int etd_substeps = 8;
};

struct PicardSection {
  double tol = 1e-10;
  int max_iter = 60;
};

struct EnsembleSection {
  std::size_t n_draws = 1000;
  /// Empty means automatic: 40 levels between 0 and the largest observed statistic.
  std::vector<double> lambda_grid;
  std::vector<double> r_list;
  /// "magnetic" or "velocity" event norms.
  std::string field;
  /// Norm name (E1...E6) or "joint".
  std::string statistic = "joint";
};

struct KernelSection {
  std::vector<double> alpha{1.0, 1.25, 1.5};
  std::vector<double> m{0.0, 1.0, 2.0};
  std::vector<double> p{2.0, 4.0};
  int dimension = 3;
  int log2_t_min = -4;
  int log2_t_max = 4;
  double slope_tol = 0.01;
};

struct BetaSection {
  std::vector<double> r{0.3, 0.5, 0.7};
  std::vector<double> s{0.7, 0.5, 0.3};
  std::vector<double> t{1.0, 7.0};
  double invariance_tol = 1e-8;
  double oracle_tol = 1e-6;
};

struct ContractionSection {
  int pairs = 10;
  double amplitude = 1e-3;
};

struct SimulateSection {
  bool regularity_gain = false;
  std::vector<int> resolutions{32, 64};
};

struct ExperimentConfig {
  /// The document as parsed, with command-line overrides applied; serialized into the manifest.
  boost::property_tree::ptree tree;

  SystemSection system;
  GridSection grid;
  DataSection data;
  ExponentSection exponents;
  TimeSection time;
  PicardSection picard;
  std::optional<EnsembleSection> ensemble;
  std::optional<KernelSection> kernels;
  std::optional<BetaSection> beta;
  ContractionSection contraction;
  SimulateSection simulate;
  std::filesystem::path output = "out";

  bool has_section(const std::string& name) const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

/// Parses and validates the whole document. Unknown sections or keys, malformed values and
/// out-of-range parameters throw ConfigError; exponent relations with no solution throw
/// InfeasibleParameters.
ExperimentConfig parse_config(std::istream& in, const Overrides& overrides = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// p = 3/(alpha - 1), the index with beta = (1 - 1/alpha)/4. Infinite at alpha = 1.
double auto_p(double alpha);
/// q = 3/(alpha - 1/2), the index with gamma = (1 - 1/(2 alpha))/4.
double auto_q(double alpha);

/// Re-emits the effective document in the same syntax it was read in.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace randhall::app
