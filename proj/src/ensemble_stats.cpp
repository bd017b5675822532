#include "randhall/ensemble_stats.hpp"

#include "randhall/errors.hpp"
#include "randhall/semigroup.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <thread>

namespace randhall {

namespace {

bool same_space(const SpaceNorm& a, const SpaceNorm& b) {
  if (a.index() != b.index()) return false;
  if (const auto* s = std::get_if<SobolevNorm>(&a)) return s->sigma == std::get<SobolevNorm>(b).sigma;
  return std::get<LebesgueNorm>(a).p == std::get<LebesgueNorm>(b).p;
}

std::vector<double> successful_statistics(const EnsembleConfig& cfg, const std::vector<DrawRecord>& records) {
  std::vector<double> x;
  x.reserve(records.size());
  for (const auto& r : records) {
    if (r.ok) x.push_back(statistic(cfg, r));
  }
  return x;
}

}  // namespace

std::vector<NamedNorm> magnetic_event_norms(const ExponentReport& e) {
  return {
      {"E1", SpaceTimeNorm{0.0, 1.0 / (2.0 * e.beta), LebesgueNorm{e.p}}},
      {"E2", SpaceTimeNorm{e.beta, 1.0 / e.beta, LebesgueNorm{e.p}}},
      {"E3", SpaceTimeNorm{e.eta, 2.0, SobolevNorm{5.5 - 2.0 * e.alpha}}},
  };
}

std::vector<NamedNorm> velocity_event_norms(const ExponentReport& e) {
  return {
      {"E4", SpaceTimeNorm{0.0, 1.0 / (2.0 * e.gamma), LebesgueNorm{e.q}}},
      {"E5", SpaceTimeNorm{e.gamma, 1.0 / e.gamma, LebesgueNorm{e.q}}},
      {"E6", SpaceTimeNorm{e.zeta, 4.0, SobolevNorm{3.5 - 2.0 * e.alpha}}},
  };
}

void validate(const EnsembleConfig& cfg) {
  if (!cfg.data) throw DomainError("ensemble: data field is required");
  if (cfg.n_draws < 1) throw DomainError("ensemble: n_draws must be positive");
  if (cfg.norms.empty()) throw DomainError("ensemble: at least one norm is required");
  for (const auto& n : cfg.norms) validate(NormSpec{n.norm});
  if (cfg.statistic >= static_cast<int>(cfg.norms.size())) throw DomainError("ensemble: statistic index out of range");
  if (!(cfg.alpha > 0.0)) throw DomainError("ensemble: alpha must be positive");
  if (!(cfg.horizon > 0.0)) throw DomainError("ensemble: horizon must be positive");
  if (cfg.steps < 1 || !(cfg.grading >= 1.0)) throw DomainError("ensemble: need steps >= 1 and grading >= 1");
  for (std::size_t i = 0; i < cfg.lambda_grid.size(); ++i) {
    if (!(cfg.lambda_grid[i] > 0.0) || (i > 0 && !(cfg.lambda_grid[i] > cfg.lambda_grid[i - 1]))) {
      throw DomainError("ensemble: lambda grid must be positive and strictly increasing");
    }
  }
  for (double r : cfg.r_list) {
    if (!(r >= 1.0)) throw DomainError("ensemble: moment orders must be >= 1");
  }
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("RANDHALL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<DrawRecord> ensemble_run(std::uint64_t base_seed, std::size_t n_draws, const DrawTask& task,
                                     unsigned threads) {
  std::vector<DrawRecord> records(n_draws);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_draws; i = next++) {
      DrawRecord& rec = records[i];
      rec.draw = i;
      rec.seed = derive_seed(base_seed, i);
      try {
        rec.values = task(i, rec.seed);
      } catch (const std::exception& ex) {
        rec.ok = false;
        rec.error = ex.what();
      }
    }
  };
  const unsigned count = std::min<std::size_t>(threads ? threads : default_thread_count(), std::max<std::size_t>(n_draws, 1));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

std::vector<DrawRecord> free_evolution_norms(const EnsembleConfig& cfg) {
  validate(cfg);
  const SpectralField& data = *cfg.data;
  const GridPtr grid = data.grid_ptr();
  const std::vector<double> times = graded_nodes(cfg.horizon, cfg.steps, cfg.grading);
  const std::vector<double> weights = trapezoid_weights(times, cfg.horizon);

  // Distinct space norms, each evaluated once per sample.
  std::vector<SpaceNorm> spaces;
  std::vector<std::size_t> slot;
  for (const auto& n : cfg.norms) {
    const auto it = std::find_if(spaces.begin(), spaces.end(), [&](const SpaceNorm& s) { return same_space(s, n.norm.space); });
    slot.push_back(static_cast<std::size_t>(it - spaces.begin()));
    if (it == spaces.end()) spaces.push_back(n.norm.space);
  }

  const DrawTask task = [&](std::size_t, std::uint64_t seed) {
    const SpectralField fw = randomize(data, draw(seed, cfg.distribution, grid));
    std::vector<std::vector<double>> samples(spaces.size(), std::vector<double>(times.size()));
    for (std::size_t j = 0; j < times.size(); ++j) {
      const SpectralField b = propagate(fw, times[j], cfg.alpha);
      for (std::size_t s = 0; s < spaces.size(); ++s) samples[s][j] = space_norm(b, spaces[s]);
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < cfg.norms.size(); ++i) {
      const SpaceTimeNorm& n = cfg.norms[i].norm;
      values.push_back(time_norm(times, weights, samples[slot[i]], n.weight, n.time_exponent));
    }
    return values;
  };
  return ensemble_run(cfg.base_seed, cfg.n_draws, task, cfg.threads);
}

double statistic(const EnsembleConfig& cfg, const DrawRecord& record) {
  if (cfg.statistic >= 0) return record.values.at(static_cast<std::size_t>(cfg.statistic));
  return *std::max_element(record.values.begin(), record.values.end());
}

std::vector<MomentRow> free_evolution_norm_stats(const EnsembleConfig& cfg, const std::vector<DrawRecord>& records) {
  validate(cfg);
  if (cfg.r_list.empty()) throw DomainError("moment statistics need at least one order r");
  const double r_max = *std::max_element(cfg.r_list.begin(), cfg.r_list.end());
  const std::vector<double> x = successful_statistics(cfg, records);
  if (x.size() < 100 || static_cast<double>(x.size()) < 50.0 * r_max) {
    throw DomainError("too few draws for the requested moments: need at least max(100, 50 r_max) = " +
                      std::to_string(static_cast<long>(std::max(100.0, 50.0 * r_max))));
  }
  const double data_norm = sobolev_norm(*cfg.data, cfg.s);
  const double peak = *std::max_element(x.begin(), x.end());
  std::vector<MomentRow> rows;
  for (double r : cfg.r_list) {
    MomentRow row;
    row.r = r;
    if (peak > 0.0) {
      double acc = 0.0;
      for (double v : x) acc += std::pow(v / peak, r);
      row.moment = peak * std::pow(acc / static_cast<double>(x.size()), 1.0 / r);
    }
    row.ratio_sqrt_r = data_norm > 0.0 ? row.moment / (std::sqrt(r) * data_norm) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<MomentRow> free_evolution_norm_stats(const EnsembleConfig& cfg) {
  return free_evolution_norm_stats(cfg, free_evolution_norms(cfg));
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

TailReport tail_estimate(const EnsembleConfig& cfg, const std::vector<DrawRecord>& records) {
  validate(cfg);
  if (cfg.lambda_grid.empty()) throw DomainError("tail estimate needs a lambda grid");
  std::vector<double> x = successful_statistics(cfg, records);
  if (x.size() < 1000) throw DomainError("tail estimate needs at least 1000 successful draws");
  std::sort(x.begin(), x.end());

  TailReport rep;
  rep.samples = x.size();
  rep.data_norm = sobolev_norm(*cfg.data, cfg.s);
  for (double lambda : cfg.lambda_grid) {
    TailRow row;
    row.lambda = lambda;
    row.exceedances = static_cast<std::size_t>(x.end() - std::lower_bound(x.begin(), x.end(), lambda));
    row.p_hat = static_cast<double>(row.exceedances) / static_cast<double>(x.size());
    std::tie(row.ci_lo, row.ci_hi) = wilson_interval(row.exceedances, x.size());
    rep.rows.push_back(row);
  }

  // Weighted least squares, weights n p / (1 - p) = inverse delta-method variance of log p_hat.
  double sw = 0.0, sx = 0.0, sy = 0.0;
  std::vector<double> xs, ys, ws;
  for (const auto& row : rep.rows) {
    if (row.p_hat > 0.5 || row.exceedances < 10) continue;
    const double w = static_cast<double>(x.size()) * row.p_hat / (1.0 - row.p_hat);
    xs.push_back(row.lambda * row.lambda);
    ys.push_back(std::log(row.p_hat));
    ws.push_back(w);
    sw += w;
    sx += w * xs.back();
    sy += w * ys.back();
  }
  rep.fitted_bins = xs.size();
  if (xs.size() < 2) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.slope = rep.intercept = rep.r_squared = rep.c1 = rep.c2 = nan;
    return rep;
  }
  const double mx = sx / sw;
  const double my = sy / sw;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += ws[i] * (xs[i] - mx) * (ys[i] - my);
    sxx += ws[i] * (xs[i] - mx) * (xs[i] - mx);
    syy += ws[i] * (ys[i] - my) * (ys[i] - my);
  }
  rep.slope = sxy / sxx;
  rep.intercept = my - rep.slope * mx;
  rep.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  rep.c1 = std::exp(rep.intercept);
  rep.c2 = -rep.slope * rep.data_norm * rep.data_norm;
  return rep;
}

TailReport tail_estimate(const EnsembleConfig& cfg) { return tail_estimate(cfg, free_evolution_norms(cfg)); }

void write_tail_csv(std::ostream& out, const TailReport& r) {
  out << "lambda,p_hat,ci_lo,ci_hi\n" << std::setprecision(17);
  for (const auto& row : r.rows) out << row.lambda << ',' << row.p_hat << ',' << row.ci_lo << ',' << row.ci_hi << '\n';
}

void write_moment_csv(std::ostream& out, const std::vector<MomentRow>& rows) {
  out << "r,moment,ratio_sqrt_r\n" << std::setprecision(17);
  for (const auto& row : rows) out << row.r << ',' << row.moment << ',' << row.ratio_sqrt_r << '\n';
}

void write_records_csv(std::ostream& out, const EnsembleConfig& cfg, const std::vector<DrawRecord>& records) {
  out << "draw,seed";
  for (const auto& n : cfg.norms) out << ',' << n.name;
  out << ",status\n" << std::setprecision(17);
  for (const auto& r : records) {
    out << r.draw << ',' << r.seed;
    for (std::size_t i = 0; i < cfg.norms.size(); ++i) {
      out << ',';
      if (r.ok) out << r.values[i];
    }
    out << ',' << (r.ok ? "ok" : "failed") << '\n';
  }
}

}  // namespace randhall
