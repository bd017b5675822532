#include <doctest.h>

#include "randhall/ensemble_stats.hpp"
#include "randhall/errors.hpp"
#include "randhall/field_factory.hpp"

#include <cmath>
#include <sstream>
#include <thread>

using namespace randhall;

namespace {

EnsembleConfig small_config(const SpectralField& data, std::size_t n) {
  EnsembleConfig cfg;
  cfg.base_seed = 21;
  cfg.n_draws = n;
  cfg.data = data;
  cfg.alpha = 1.25;
  cfg.horizon = 1.0;
  cfg.steps = 8;
  cfg.norms = magnetic_event_norms(parameter_feasibility(1.25, 12.0, 6.0));
  cfg.threads = 2;
  return cfg;
}

}  // namespace

TEST_CASE("Wilson score interval") {
  auto check = [](std::size_t k, std::size_t n, double lo, double hi) {
    const auto [a, b] = wilson_interval(k, n);
    CHECK(a == doctest::Approx(lo).epsilon(1e-9));
    CHECK(b == doctest::Approx(hi).epsilon(1e-9));
  };
  check(0, 100, 0.0, 0.036993498206985692);
  check(10, 100, 0.055229137060675088, 0.17436566150491348);
  check(500, 1000, 0.46906960036810419, 0.53093039963189581);
  check(1, 10000, 1.7652673601122363e-05, 0.00056626889740133833);
}

TEST_CASE("ensemble runner") {
  auto task = [](std::size_t i, std::uint64_t seed) {
    if (i == 3) throw DomainError("synthetic failure");
    return std::vector<double>{static_cast<double>(i), static_cast<double>(seed % 1000)};
  };
  SUBCASE("single draw") {
    const auto r = ensemble_run(5, 1, task, 1);
    REQUIRE(r.size() == 1);
    CHECK(r[0].seed == derive_seed(5, 0));
  }
  SUBCASE("results do not depend on scheduling") {
    const auto a = ensemble_run(5, 50, task, 1);
    const auto b = ensemble_run(5, 50, task, 4);
    for (std::size_t i = 0; i < 50; ++i) {
      CHECK(a[i].draw == i);
      CHECK(b[i].draw == i);
      CHECK(a[i].values == b[i].values);
      CHECK(a[i].ok == b[i].ok);
    }
  }
  SUBCASE("a failing draw is recorded and the run continues") {
    const auto r = ensemble_run(5, 10, task, 3);
    CHECK_FALSE(r[3].ok);
    CHECK(r[3].error == "synthetic failure");
    CHECK(r[9].ok);
  }
}

TEST_CASE("free-evolution moments") {
  const auto g = Grid::make(8);
  SUBCASE("zero data has zero moments") {
    EnsembleConfig cfg = small_config(SpectralField(g), 100);
    cfg.r_list = {2.0};
    for (const auto& m : free_evolution_norm_stats(cfg)) CHECK(m.moment == 0.0);
  }
  SUBCASE("one mode pair under Rademacher signs is deterministic") {
    SpectralField f(g);
    f.set_mode({1, 1, 0}, Vector3c(1.0, -1.0, 0.5));
    EnsembleConfig cfg = small_config(f, 100);
    cfg.distribution = Distribution::Rademacher;
    cfg.statistic = 1;
    cfg.r_list = {1.0, 2.0};
    const auto records = free_evolution_norms(cfg);
    const double value = statistic(cfg, records[0]);
    for (const auto& m : free_evolution_norm_stats(cfg, records)) CHECK(m.moment == doctest::Approx(value).epsilon(1e-12));
  }
  SUBCASE("ratio to sqrt(r) stays below twice its r = 2 value") {
    // The sqrt(r) growth is an upper bound; the concentrated norm of a many-mode field grows slower.
    EnsembleConfig cfg = small_config(random_solenoidal(g, 4, 2.0), 10000);
    cfg.r_list = {2.0, 4.0, 8.0, 16.0};
    const auto rows = free_evolution_norm_stats(cfg);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i].ratio_sqrt_r <= 2.0 * rows[0].ratio_sqrt_r);
      CHECK(rows[i].moment >= rows[i - 1].moment);
    }
  }
  SUBCASE("too few draws for the requested order") {
    EnsembleConfig cfg = small_config(random_solenoidal(g, 4, 2.0), 100);
    cfg.r_list = {8.0};
    CHECK_THROWS_AS(free_evolution_norm_stats(cfg), DomainError);
  }
}

TEST_CASE("tail estimate") {
  const auto g = Grid::make(8);
  SUBCASE("zero data never exceeds a positive level") {
    EnsembleConfig cfg = small_config(SpectralField(g), 1000);
    cfg.lambda_grid = {1e-6, 0.5, 1.0};
    for (const auto& row : tail_estimate(cfg).rows) CHECK(row.p_hat == 0.0);
  }
  SUBCASE("exact Gaussian tail is recovered") {
    // values x_i = sqrt(-log(u_i) / c) on a uniform grid of u have P(X >= l) = exp(-c l^2)
    SpectralField f(g);
    f.set_mode({1, 0, 0}, Vector3c(0.0, 1.0, 0.0));
    EnsembleConfig cfg = small_config(f, 20000);
    cfg.statistic = 0;
    const double c = 0.8;
    std::vector<DrawRecord> records(cfg.n_draws);
    for (std::size_t i = 0; i < records.size(); ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(records.size());
      records[i].draw = i;
      records[i].values = {std::sqrt(-std::log(u) / c)};
    }
    for (int i = 1; i <= 30; ++i) cfg.lambda_grid.push_back(0.1 * i);
    const TailReport rep = tail_estimate(cfg, records);
    CHECK(rep.slope == doctest::Approx(-c).epsilon(0.01));
    CHECK(rep.r_squared >= 0.999);
    // ||f||_{H^0}^2 = 2
    CHECK(rep.c2 == doctest::Approx(2.0 * c).epsilon(0.01));
    CHECK(rep.c1 == doctest::Approx(1.0).epsilon(0.02));
    for (const auto& row : rep.rows) {
      CHECK(row.ci_lo <= row.p_hat);
      CHECK(row.p_hat <= row.ci_hi);
    }
  }
  SUBCASE("needs a thousand draws") {
    EnsembleConfig cfg = small_config(SpectralField(g), 999);
    cfg.lambda_grid = {1.0};
    CHECK_THROWS_AS(tail_estimate(cfg), DomainError);
  }
}

TEST_CASE("CSV output is reproducible byte for byte") {
  const auto g = Grid::make(8);
  EnsembleConfig cfg = small_config(random_solenoidal(g, 9, 2.0), 1000);
  cfg.r_list = {2.0, 4.0};
  cfg.lambda_grid = {0.5, 1.0, 1.5, 2.0};
  auto render = [&](unsigned threads) {
    cfg.threads = threads;
    const auto records = free_evolution_norms(cfg);
    std::ostringstream out;
    write_records_csv(out, cfg, records);
    write_tail_csv(out, tail_estimate(cfg, records));
    write_moment_csv(out, free_evolution_norm_stats(cfg, records));
    return out.str();
  };
  const std::string a = render(1);
  CHECK(a == render(3));
  CHECK(a.rfind("draw,seed,E1,E2,E3,status\n", 0) == 0);
  CHECK(a.find("lambda,p_hat,ci_lo,ci_hi\n") != std::string::npos);
  CHECK(a.find("r,moment,ratio_sqrt_r\n") != std::string::npos);
}

TEST_CASE("ensemble config validation") {
  const auto g = Grid::make(8);
  EnsembleConfig cfg = small_config(SpectralField(g), 10);
  CHECK_NOTHROW(validate(cfg));
  cfg.lambda_grid = {1.0, 0.5};
  CHECK_THROWS_AS(validate(cfg), DomainError);
  cfg.lambda_grid.clear();
  cfg.data.reset();
  CHECK_THROWS_AS(validate(cfg), DomainError);
}
