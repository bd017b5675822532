// Acceptance suite: one PASS/FAIL line per criterion, each with its own runtime limit.
// Exit status is the number of failed criteria.

#include "randhall/dynamics.hpp"
#include "randhall/ensemble_stats.hpp"
#include "randhall/field_factory.hpp"
#include "randhall/mild_solver.hpp"
#include "randhall/norms.hpp"
#include "randhall/operators.hpp"
#include "randhall/semigroup.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace randhall;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond) { ok = ok && cond; }
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.ok = false;
    out.detail << "exception: " << e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = out.ok && elapsed < limit_s;
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s; %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", id, name, out.detail.str().c_str(),
              elapsed, limit_s);
  std::fflush(stdout);
}

double l2(const SpectralField& f) { return sobolev_norm(f, 0.0); }

double rel(const SpectralField& a, const SpectralField& b) { return l2(a - b) / l2(b); }

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void kernel_lemma(Outcome& o) {
  double worst = 0.0;
  for (double alpha : {1.0, 1.25, 1.5})
    for (double m : {0.0, 1.0, 2.0})
      for (double p : {2.0, 4.0}) {
        std::vector<double> lt, lk;
        for (int j = -4; j <= 4; ++j) {
          const double t = std::ldexp(1.0, j);
          lt.push_back(std::log(t));
          lk.push_back(std::log(kernel_norm({alpha, m, p, 3, t})));
        }
        const double expected = -m / (2 * alpha) - 3.0 / (2 * p * alpha);
        worst = std::max(worst, std::abs(fit_slope(lt, lk) - expected) / std::abs(expected));
      }
  const double value_err = std::abs(kernel_norm({1.0, 0.0, 2.0, 3, 1.0}) - std::pow(std::numbers::pi / 2, 0.75));
  o.require(worst <= 0.01);
  o.require(value_err <= 1e-6);
  o.detail << "worst relative slope error " << worst << " (tol 1e-2), (pi/2)^(3/4) error " << value_err
           << " (tol 1e-6)";
}

void beta_lemma(Outcome& o) {
  double spread = 0.0, oracle = 0.0;
  for (auto [r, s] : {std::pair{0.3, 0.7}, std::pair{0.5, 0.5}, std::pair{0.7, 0.3}}) {
    const double exact = std::tgamma(1 - r) * std::tgamma(1 - s) / std::tgamma(2 - r - s);
    const double v1 = beta_time_integral(r, s, 1.0);
    const double v7 = beta_time_integral(r, s, 7.0);
    spread = std::max(spread, std::abs(v1 - v7));
    oracle = std::max({oracle, std::abs(v1 - exact), std::abs(v7 - exact)});
  }
  o.require(spread <= 1e-8);
  o.require(oracle <= 1e-6);
  o.detail << "t = 1 vs 7 gap " << spread << " (tol 1e-8), Gamma oracle error " << oracle << " (tol 1e-6)";
}

void randomization(Outcome& o) {
  const auto g = Grid::make(32);
  const SpectralField f = power_law_field(g, 0.5, 1.0, 0.0, 1);

  double preserve = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SpectralField fw = randomize(f, draw(seed, Distribution::Rademacher, g));
    for (double sigma : {-1.0, 0.0, 0.5, 1.75, 3.0})
      preserve = std::max(preserve, std::abs(sobolev_norm(fw, sigma) / sobolev_norm(f, sigma) - 1.0));
  }

  const double s = 0.5;
  const double target = std::pow(sobolev_norm(f, s), 2);
  const std::size_t n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::pow(sobolev_norm(randomize(f, draw(derive_seed(77, i), Distribution::Gaussian, g)), s), 2);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / (n - 1));
  const double z = std::abs(mean - target) / se;

  SpectralField h(g);
  h.coeffs() = from_physical(g, to_physical(random_solenoidal(g, 3, 10.0)).cube()).coeffs();
  double commute = 0.0;
  for (const auto dist : {Distribution::Rademacher, Distribution::Gaussian}) {
    const RandomDraw d = draw(5, dist, g);
    commute = std::max(commute, rel(leray_project(randomize(h, d)), randomize(leray_project(h), d)));
  }
  o.require(preserve <= 1e-13);
  o.require(z <= 3.0);
  o.require(commute <= 1e-14);
  o.detail << "Rademacher norm drift " << preserve << " (tol 1e-13), Gaussian mean off by " << z
           << " standard errors (tol 3), Leray commutation " << commute << " (tol 1e-14)";
}

void moment_bound(Outcome& o) {
  const std::vector<double> qs{2, 4, 8, 16, 32, 64};
  double worst = 0.0;
  for (std::uint64_t v = 0; v < 3; ++v) {
    std::vector<double> c(256);
    const CounterRng rng(1000 + v);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = rng.gaussian(i) * (1.0 + static_cast<double>(i % 5));
    for (const auto dist : {Distribution::Rademacher, Distribution::Gaussian}) {
      double lo = 1e300, hi = 0.0;
      for (const auto& m : moment_check(c, qs, 100000, 50 + v, dist)) {
        lo = std::min(lo, m.bound_ratio);
        hi = std::max(hi, m.bound_ratio);
      }
      worst = std::max(worst, hi / lo);
    }
  }
  o.require(worst <= 2.0);
  o.detail << "max/min ratio across q in 2..64 " << worst << " (tol 2)";
}

void hall_identities(Outcome& o) {
  const auto g = Grid::make(32);
  const double beltrami = hall_term(beltrami_field(g, 3)).coeffs().abs().maxCoeff();
  double forms = 0.0, pairing = 0.0;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const SpectralField b = random_solenoidal(g, 100 + seed, 10.0);
    const SpectralField h = hall_term(b);
    forms = std::max(forms, rel(hall_term_tensor_form(b), h));
    pairing = std::max(pairing, std::abs(inner_product(h, b)) / (l2(h) * l2(b)));
  }
  o.require(beltrami <= 1e-12);
  o.require(forms <= 1e-10);
  o.require(pairing <= 1e-11);
  o.detail << "Beltrami Hall term " << beltrami << " (tol 1e-12), two-form gap " << forms
           << " (tol 1e-10), normalized pairing " << pairing << " (tol 1e-11)";
}

void energy_law(Outcome& o) {
  const auto g = Grid::make(32);
  SolverConfig cfg;
  cfg.kind = {SystemTag::HallMHD, 1.25};
  cfg.horizon = 0.05;
  cfg.graded = false;
  cfg.f = 0.3 * random_solenoidal(g, 21, 4.0);
  cfg.g = 0.3 * random_solenoidal(g, 22, 4.0);
  std::vector<double> res;
  for (int steps : {20, 40, 80, 160}) {
    cfg.steps = steps;
    const StateTrajectories s = etd_integrate(cfg);
    res.push_back(energy_balance(*s.u, *s.B, 1.25).max_abs_residual);
  }
  o.detail << "orders";
  for (std::size_t i = 0; i + 1 < res.size(); ++i) {
    const double order = std::log2(res[i] / res[i + 1]);
    o.require(std::abs(order - 2.0) <= 0.3);
    o.detail << " " << order;
  }
  o.detail << " (target 2 +- 0.3), finest residual " << res.back();
}

void fixed_point(Outcome& o) {
  const auto g = Grid::make(32);
  SolverConfig cfg;
  cfg.kind = {SystemTag::ElectronMHD, 1.25};
  cfg.p = 12.0;
  cfg.horizon = 0.01;
  cfg.steps = 64;
  cfg.graded = false;
  cfg.etd_substeps = 8;
  cfg.f = randomize(power_law_field(g, 0.5, 0.02, 0.0, 7), draw(7, Distribution::Rademacher, g));
  cfg.s_f = 0.5;
  const ExponentReport e = validate(cfg);
  const PicardResult r = picard_solve(cfg);
  const auto times = time_nodes(cfg);
  const Trajectory free = free_evolution(*cfg.f, 1.25, times, cfg.horizon);
  const Trajectory etd = *etd_integrate(cfg).B;
  const double sigma = 3.5 - 2.0 * 1.25;
  double scale = 0.0, gap = 0.0;
  for (std::size_t j = 0; j < times.size(); ++j) {
    scale = std::max(scale, sobolev_norm(etd.field(j), sigma));
    gap = std::max(gap, sobolev_norm(free.field(j) + r.correction.B->field(j) - etd.field(j), sigma));
  }
  const std::size_t last = times.size() - 1;
  const double at_T = sobolev_norm(free.field(last) + r.correction.B->field(last) - etd.field(last), sigma) /
                      sobolev_norm(etd.field(last), sigma);
  o.require(std::abs(e.beta - 0.05) <= 1e-12);
  o.require(r.report.converged && r.report.rho < 1.0);
  o.require(gap / scale <= 1e-6);
  o.require(at_T <= 1e-6);
  o.detail << "beta " << e.beta << ", " << r.report.iterations << " Picard iterations with rho " << r.report.rho
           << ", sup-in-time H^1 gap " << gap / scale << ", at T " << at_T << " (tol 1e-6)";
}

void regularity_gain_check(Outcome& o) {
  SolverConfig base;
  base.kind = {SystemTag::ElectronMHD, 1.25};
  base.horizon = 0.01;
  base.steps = 24;
  base.picard_tol = 1e-8;
  const double s = std::max(5.5 - 4 * 1.25, 2.5 - 2 * 1.25);
  const auto rows = regularity_gain(base, s, 0.05, 11, Distribution::Rademacher, {32, 64});
  const double data_growth = rows[1].data_norm_critical / rows[0].data_norm_critical;
  const double h_ratio = rows[1].correction_sup_critical / rows[0].correction_sup_critical;
  const double variation = std::max(h_ratio, 1.0 / h_ratio);
  o.require(data_growth >= 1.5);
  o.require(variation <= 2.0);
  o.detail << "s = " << s << ", data H^1 growth N 32 -> 64 " << data_growth << " (>= 1.5), sup H^1 of H varies by "
           << variation << "x (<= 2)";
}

void tail_bounds(Outcome& o) {
  const auto g = Grid::make(16);
  const SpectralField f = random_solenoidal(g, 5, 3.0);
  auto fit = [&](const SpectralField& data, std::uint64_t seed) {
    EnsembleConfig cfg;
    cfg.base_seed = seed;
    cfg.n_draws = 10000;
    cfg.distribution = Distribution::Gaussian;
    cfg.data = data;
    cfg.alpha = 1.25;
    cfg.s = 0.5;
    cfg.horizon = 1.0;
    cfg.steps = 16;
    cfg.norms = magnetic_event_norms(parameter_feasibility(1.25, 12.0, 6.0));
    cfg.statistic = -1;
    const auto records = free_evolution_norms(cfg);
    double largest = 0.0;
    for (const auto& r : records) largest = std::max(largest, statistic(cfg, r));
    for (int i = 1; i <= 40; ++i) cfg.lambda_grid.push_back(largest * i / 40.0);
    return tail_estimate(cfg, records);
  };
  const TailReport one = fit(f, 101);
  const TailReport two = fit(2.0 * f, 202);
  const double ratio = two.slope / one.slope;
  o.require(one.slope < 0.0 && two.slope < 0.0);
  o.require(one.r_squared >= 0.95 && two.r_squared >= 0.95);
  o.require(ratio >= 0.2 && ratio <= 1.0 / 3.0);
  o.detail << "slopes " << one.slope << " and " << two.slope << ", R^2 " << one.r_squared << " and " << two.r_squared
           << " (>= 0.95), slope ratio 2f/f " << ratio << " (in [0.2, 0.333]), c2 " << one.c2 << " vs " << two.c2;
}

void reductions(Outcome& o) {
  const auto g = Grid::make(16);
  SolverConfig emhd;
  emhd.kind = {SystemTag::ElectronMHD, 1.25};
  emhd.horizon = 0.01;
  emhd.steps = 16;
  emhd.f = 0.1 * random_solenoidal(g, 31, 4.0);
  SolverConfig coupled = emhd;
  coupled.kind.tag = SystemTag::HallMHD;
  coupled.static_flow = true;
  coupled.g = SpectralField(g);

  const PicardResult pe = picard_solve(emhd);
  const PicardResult pc = picard_solve(coupled);
  const StateTrajectories ee = etd_integrate(emhd);
  const StateTrajectories ec = etd_integrate(coupled);
  double reduction = 0.0;
  for (std::size_t j = 1; j < pe.correction.B->size(); ++j) {
    reduction = std::max(reduction, rel(pc.correction.B->field(j), pe.correction.B->field(j)));
    reduction = std::max(reduction, rel(ec.B->field(j), ee.B->field(j)));
  }

  const auto times = uniform_nodes(0.2, 200);
  const Trajectory heat = free_evolution(beltrami_field(g, 1), 1.25, times, 0.2);
  const double scaling = scaling_residual(emhd.kind, heat, 2, 0.1 / std::pow(2.0, 2.5));

  SolverConfig hall;
  hall.kind = {SystemTag::HallMHD, 1.25};
  hall.horizon = 0.01;
  hall.steps = 8;
  hall.f = 0.3 * random_solenoidal(g, 32, 5.0);
  hall.g = 0.3 * random_solenoidal(g, 33, 5.0);
  const StateTrajectories run = etd_integrate(hall);
  double pairing = 0.0;
  for (std::size_t j = 0; j < run.B->size(); ++j) {
    const SpectralField& u = run.u->field(j);
    const SpectralField& b = run.B->field(j);
    const FieldPair n = nonlinear_terms(SystemTag::HallMHD, u, b);
    pairing = std::max(pairing, std::abs(inner_product(n.u, u) + inner_product(n.B, b)) /
                                    (l2(n.u) * l2(u) + l2(n.B) * l2(b)));
  }
  o.require(reduction <= 1e-10);
  o.require(scaling <= 1e-10);
  o.require(pairing <= 1e-11);
  o.detail << "coupled (g = 0) vs electron MHD " << reduction << " (tol 1e-10), heat scaling residual " << scaling
           << " (tol 1e-10), cross-cancellation " << pairing << " (tol 1e-11)";
}

}  // namespace

int main() {
  criterion(1, "kernel lemma", 10, kernel_lemma);
  criterion(2, "Beta lemma", 1, beta_lemma);
  criterion(3, "randomization", 30, randomization);
  criterion(4, "moment bound", 60, moment_bound);
  criterion(5, "Hall identities", 60, hall_identities);
  criterion(6, "energy law", 300, energy_law);
  criterion(7, "fixed point", 600, fixed_point);
  criterion(8, "regularity gain", 1200, regularity_gain_check);
  criterion(9, "tail bounds", 600, tail_bounds);
  criterion(10, "reductions and symmetry", 60, reductions);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures;
}
