#pragma once

#include "randhall/mild_solver.hpp"
#include "randhall/norms.hpp"
#include "randhall/randomization.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace randhall {

struct NamedNorm {
  std::string name;
  SpaceTimeNorm norm;
};

/// Norms of the free evolution defining the magnetic exceptional sets:
/// L^{1/(2 beta)}_t L^p, L^{(beta, 1/beta)}_t L^p and L^{(eta, 2)}_t H^{11/2 - 2 alpha}.
std::vector<NamedNorm> magnetic_event_norms(const ExponentReport& e);
/// Velocity analogues with (gamma, q, zeta): L^{1/(2 gamma)}_t L^q, L^{(gamma, 1/gamma)}_t L^q,
/// L^{(zeta, 4)}_t H^{7/2 - 2 alpha}.
std::vector<NamedNorm> velocity_event_norms(const ExponentReport& e);

struct EnsembleConfig {
  std::uint64_t base_seed = 1;
  std::size_t n_draws = 1000;
  Distribution distribution = Distribution::Gaussian;
  /// Deterministic data whose randomization is propagated freely.
  std::optional<SpectralField> data;
  double alpha = 1.25;
  /// Sobolev index s of ||f||_{H^s}, the normalization of moments and tail constants.
  double s = 0.0;
  double horizon = 1.0;
  /// Time nodes for the space-time norms, t_j = T (j/M)^grading.
  int steps = 16;
  double grading = 2.0;
  std::vector<NamedNorm> norms;
  /// Index into `norms` used for tails and moments; negative selects the joint quantity max_i norm_i,
  /// whose exceedance event is the union of the marginal ones.
  int statistic = 0;
  std::vector<double> lambda_grid;
  std::vector<double> r_list;
  /// Worker threads; 0 reads RANDHALL_THREADS, falling back to the hardware concurrency.
  unsigned threads = 0;
};

/// Throws DomainError on an inconsistent config (missing data, empty norm list, bad grid...).
void validate(const EnsembleConfig& cfg);

struct DrawRecord {
  std::size_t draw = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;
  bool ok = true;
  std::string error;
};

using DrawTask = std::function<std::vector<double>(std::size_t draw, std::uint64_t seed)>;

/// Worker count from RANDHALL_THREADS, else the hardware concurrency (at least 1).
unsigned default_thread_count();

/// Runs task(i, derive_seed(base, i)) for i < n_draws on a worker pool. Records come back in draw
/// order whatever the execution order; a throwing task marks its record failed and the run continues.
std::vector<DrawRecord> ensemble_run(std::uint64_t base_seed, std::size_t n_draws, const DrawTask& task,
                                     unsigned threads = 0);

/// Every configured norm of the free evolution of data^omega for each draw.
std::vector<DrawRecord> free_evolution_norms(const EnsembleConfig& cfg);

/// The configured statistic (single norm or joint max) of a successful record.
double statistic(const EnsembleConfig& cfg, const DrawRecord& record);

struct MomentRow {
  double r = 0.0;
  /// (mean |X|^r)^{1/r} over successful draws.
  double moment = 0.0;
  /// moment / (sqrt(r) ||f||_{H^s}).
  double ratio_sqrt_r = 0.0;
};

/// L^r(Omega) moments of the statistic. Requires n_draws >= 100 and n_draws >= 50 max(r).
std::vector<MomentRow> free_evolution_norm_stats(const EnsembleConfig& cfg, const std::vector<DrawRecord>& records);
std::vector<MomentRow> free_evolution_norm_stats(const EnsembleConfig& cfg);

struct TailRow {
  double lambda = 0.0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t exceedances = 0;
};

struct TailReport {
  std::vector<TailRow> rows;
  std::size_t samples = 0;
  /// Weighted least squares of log p_hat against lambda^2 over bins with p_hat <= 1/2 and at
  /// least 10 exceedances; NaN when fewer than two bins qualify.
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t fitted_bins = 0;
  /// Constants of p <= c1 exp(-c2 lambda^2 / ||f||^2_{H^s}): c1 = e^intercept, c2 = -slope ||f||^2.
  double c1 = 0.0;
  double c2 = 0.0;
  double data_norm = 0.0;
};

/// Wilson score interval at 95% for k successes in n trials.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n);

/// Empirical survival function of the statistic on the lambda grid plus the Gaussian-tail fit.
/// Requires n_draws >= 1000.
TailReport tail_estimate(const EnsembleConfig& cfg, const std::vector<DrawRecord>& records);
TailReport tail_estimate(const EnsembleConfig& cfg);

void write_tail_csv(std::ostream& out, const TailReport& r);
void write_moment_csv(std::ostream& out, const std::vector<MomentRow>& rows);
void write_records_csv(std::ostream& out, const EnsembleConfig& cfg, const std::vector<DrawRecord>& records);

}  // namespace randhall
