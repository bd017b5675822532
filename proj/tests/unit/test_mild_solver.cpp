#include <doctest.h>

#include "randhall/errors.hpp"
#include "randhall/field_factory.hpp"
#include "randhall/mild_solver.hpp"
#include "randhall/norms.hpp"
#include "randhall/semigroup.hpp"

#include <cmath>
#include <sstream>

using namespace randhall;

namespace {

double l2(const SpectralField& f) { return sobolev_norm(f, 0.0); }

SolverConfig emhd_config(const GridPtr& g, double amplitude, std::uint64_t seed) {
  SolverConfig cfg;
  cfg.kind = {SystemTag::ElectronMHD, 1.25};
  cfg.horizon = 0.01;
  cfg.p = 12.0;
  cfg.steps = 16;
  cfg.f = amplitude * random_solenoidal(g, seed, 3.0);
  return cfg;
}

}  // namespace

TEST_CASE("exponent relations") {
  const ExponentReport e = parameter_feasibility(1.25, 12.0, 6.0);
  CHECK(e.beta == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(e.gamma == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(exponents_for(SystemTag::NSE, 1.0, 12.0, 6.0).gamma == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(e.eta > e.eta_lo);
  CHECK(e.eta < e.eta_hi);
  CHECK_FALSE(e.eta_window_empty);

  for (double p : {2.0, 12.0, 1000.0}) {
    try {
      exponents_for(SystemTag::ElectronMHD, 1.0, p, 6.0);
      FAIL("alpha = 1 electron MHD must be infeasible");
    } catch (const InfeasibleParameters& ex) {
      CHECK(ex.relation() == std::string(kMagneticRelation));
      // beta = -3/(4p)
      CHECK(std::string(ex.what()).find(std::to_string(-3.0 / (4.0 * p)).substr(0, 6)) != std::string::npos);
    }
  }
  CHECK_THROWS_AS(parameter_feasibility(1.8, 12.0, 6.0), DomainError);
  CHECK_THROWS_AS(parameter_feasibility(1.25, 1.5, 6.0), DomainError);
}

TEST_CASE("data thresholds") {
  CHECK(magnetic_data_threshold(1.25) == doctest::Approx(0.5));
  CHECK(magnetic_data_threshold(1.5) == doctest::Approx(-0.5));
  CHECK(velocity_data_threshold(1.0) == doctest::Approx(0.0));
  CHECK(velocity_data_threshold(1.25) == doctest::Approx(-0.875));
}

TEST_CASE("config validation") {
  const auto g = Grid::make(8);
  SolverConfig cfg = emhd_config(g, 0.1, 1);
  CHECK_NOTHROW(validate(cfg));
  SUBCASE("missing data") {
    cfg.f.reset();
    CHECK_THROWS_AS(validate(cfg), PreconditionError);
  }
  SUBCASE("bad node count") {
    cfg.steps = 0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
  }
  SUBCASE("data below the regularity threshold") {
    cfg.s_f = 0.2;
    CHECK_THROWS_AS(validate(cfg), InfeasibleParameters);
  }
  SUBCASE("compressible data") {
    SpectralField f(g);
    f.set_mode({1, 0, 0}, Vector3c(1.0, 0.0, 0.0));
    cfg.f = f;
    CHECK_THROWS_AS(validate(cfg), PreconditionError);
  }
}

TEST_CASE("free evolution") {
  const auto g = Grid::make(16);
  const SpectralField f = random_solenoidal(g, 2, 5.0);
  const auto times = graded_nodes(0.1, 12, 2.0);
  const Trajectory tr = free_evolution(f, 1.25, times, 0.1);
  CHECK((tr.field(0).coeffs() - f.coeffs()).abs().maxCoeff() == 0.0);
  for (std::size_t j = 1; j < tr.size(); ++j) CHECK(sobolev_norm(tr.field(j), 1.5) <= sobolev_norm(tr.field(j - 1), 1.5));

  SUBCASE("agrees with the integrator when the nonlinearity vanishes") {
    SpectralField m(g);
    m.set_mode({2, -1, 0}, Vector3c(Complex(1.0, 0.5), Complex(2.0, 1.0), Complex(0.0, -0.7)));
    SolverConfig cfg = emhd_config(g, 1.0, 1);
    cfg.f = m;
    cfg.horizon = 0.1;
    cfg.steps = 12;
    const Trajectory etd = *etd_integrate(cfg).B;
    const Trajectory free = free_evolution(m, 1.25, time_nodes(cfg), 0.1);
    for (std::size_t j = 0; j < etd.size(); ++j) CHECK(l2(etd.field(j) - free.field(j)) <= 1e-13 * l2(m));
  }
}

TEST_CASE("Duhamel quadrature") {
  const auto g = Grid::make(8);
  const auto times = uniform_nodes(0.3, 6);
  SUBCASE("zero forcing") {
    const Trajectory out = duhamel_quadrature(times, 0.3, 1.25, [&](std::size_t) { return SpectralField(g); });
    for (const auto& f : out.fields()) CHECK(l2(f) == 0.0);
  }
  SUBCASE("constant single-mode forcing integrates in closed form") {
    SpectralField q(g);
    q.set_mode({1, 1, 0}, Vector3c(0.0, 0.0, 1.0));
    const Trajectory out = duhamel_quadrature(times, 0.3, 1.25, [&](std::size_t) { return q; });
    CHECK(l2(out.field(0)) == 0.0);
    const double rate = std::pow(2.0, 1.25);
    for (std::size_t j = 1; j < out.size(); ++j) {
      const double expected = (1.0 - std::exp(-times[j] * rate)) / rate;
      CHECK(std::abs(out.field(j).mode({1, 1, 0})(2) - expected) <= 1e-14);
    }
  }
  SUBCASE("linear-in-time forcing is integrated exactly") {
    SpectralField q(g);
    q.set_mode({0, 2, 0}, Vector3c(1.0, 0.0, 0.0));
    const double a = std::pow(4.0, 1.25);
    const Trajectory out = duhamel_quadrature(times, 0.3, 1.25, [&](std::size_t j) { return times[j] * q; });
    // int_0^t e^{-a(t - s)} s ds = t/a - (1 - e^{-a t})/a^2
    for (std::size_t j = 1; j < out.size(); ++j) {
      const double t = times[j];
      CHECK(std::abs(out.field(j).mode({0, 2, 0})(0).real() - (t / a - (1.0 - std::exp(-a * t)) / (a * a))) <= 1e-14);
    }
  }
  CHECK_THROWS(duhamel_quadrature({0.1, 0.2}, 0.3, 1.25, [&](std::size_t) { return SpectralField(g); }));
}

TEST_CASE("Duhamel map of zero input is zero") {
  const auto g = Grid::make(8);
  SolverConfig cfg = emhd_config(g, 0.0, 1);
  const auto times = time_nodes(cfg);
  StateTrajectories zero;
  zero.B = Trajectory(times, std::vector<SpectralField>(times.size(), SpectralField(g)), cfg.horizon);
  const StateTrajectories out = duhamel_apply(cfg, zero, zero);
  for (const auto& f : out.B->fields()) CHECK(l2(f) == 0.0);
}

TEST_CASE("Picard iteration") {
  const auto g = Grid::make(16);
  SUBCASE("zero data converges immediately to zero") {
    const PicardResult r = picard_solve(emhd_config(g, 0.0, 1));
    CHECK(r.report.iterations == 1);
    for (const auto& f : r.correction.B->fields()) CHECK(l2(f) == 0.0);
  }
  SUBCASE("small data: geometric convergence and agreement with the integrator") {
    SolverConfig cfg = emhd_config(g, 0.2, 3);
    cfg.graded = false;
    cfg.steps = 64;
    cfg.etd_substeps = 8;
    const PicardResult r = picard_solve(cfg);
    CHECK(r.report.converged);
    CHECK(r.report.rho < 1.0);
    CHECK(r.report.rho > 0.0);
    const auto times = time_nodes(cfg);
    const Trajectory free = free_evolution(*cfg.f, 1.25, times, cfg.horizon);
    const Trajectory etd = *etd_integrate(cfg).B;
    const std::size_t last = times.size() - 1;
    const SpectralField picard_T = free.field(last) + r.correction.B->field(last);
    CHECK(sobolev_norm(picard_T - etd.field(last), 1.0) <= 1e-6 * sobolev_norm(etd.field(last), 1.0));
  }
  SUBCASE("larger data contract more slowly") {
    double prev = 0.0;
    for (double amp : {0.1, 0.2, 0.4}) {
      const double rho = picard_solve(emhd_config(g, amp, 4)).report.rho;
      CHECK(rho > prev);
      prev = rho;
    }
  }
  SUBCASE("non-convergence reports the residual history") {
    SolverConfig cfg = emhd_config(g, 0.2, 3);
    cfg.max_iterations = 2;
    cfg.picard_tol = 1e-14;
    try {
      picard_solve(cfg);
      FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
      CHECK(e.residuals().size() == 2);
    }
  }
}

TEST_CASE("ETD integrator is second order against a manufactured solution") {
  const auto g = Grid::make(8);
  SpectralField mode(g);
  mode.set_mode({1, 0, 1}, Vector3c(Complex(0.0, 1.0), Complex(1.0, 0.0), Complex(0.0, -1.0)));
  const double rate = std::pow(2.0, 1.25);
  // B(t) = (1 + sin 20t) mode solves B' = -(-Delta)^alpha B + (20 cos 20t + rate (1 + sin 20t)) mode
  const Forcing forcing = [&](double t) {
    return FieldPair{SpectralField(g), (20.0 * std::cos(20.0 * t) + rate * (1.0 + std::sin(20.0 * t))) * mode};
  };
  SolverConfig cfg;
  cfg.kind = {SystemTag::ElectronMHD, 1.25};
  cfg.horizon = 0.5;
  cfg.graded = false;
  cfg.f = mode;
  std::vector<double> err;
  for (int steps : {20, 40, 80, 160}) {
    cfg.steps = steps;
    const Trajectory B = *etd_integrate(cfg, forcing).B;
    err.push_back(l2(B.field(B.size() - 1) - (1.0 + std::sin(10.0)) * mode));
  }
  for (std::size_t i = 0; i + 1 < err.size(); ++i) CHECK(std::log2(err[i] / err[i + 1]) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("ETD overflow guard") {
  const auto g = Grid::make(8);
  SolverConfig cfg = emhd_config(g, 1.0, 5);
  cfg.horizon = 1.0;
  cfg.graded = false;
  cfg.steps = 4;
  const Forcing huge = [&](double) { return FieldPair{SpectralField(g), 1e12 * *cfg.f}; };
  CHECK_THROWS_AS(etd_integrate(cfg, huge), BlowUp);
}

TEST_CASE("contraction probes") {
  const auto g = Grid::make(16);
  SolverConfig cfg = emhd_config(g, 0.0, 1);
  const auto times = time_nodes(cfg);
  auto linear_in_time = [&](std::uint64_t seed) {
    const SpectralField shape = 1e-3 * random_solenoidal(g, seed, 3.0);
    std::vector<SpectralField> fields;
    for (double t : times) fields.push_back((t / cfg.horizon) * shape);
    StateTrajectories s;
    s.B = Trajectory(times, fields, cfg.horizon);
    return s;
  };
  SUBCASE("identical candidates are degenerate") {
    const StateTrajectories h = linear_in_time(1);
    const ProbeResult p = contraction_probe(cfg, h, h);
    CHECK(p.degenerate);
    CHECK(p.difference == 0.0);
  }
  SUBCASE("zero free data: the empirical constant is stable across pairs") {
    const ContractionReport rep = contraction_probe_ensemble(cfg, 10, 1e-3, 77);
    CHECK(rep.residuals.size() == 10);
    CHECK(rep.skipped == 0);
    CHECK(rep.C > 0.0);
    CHECK(rep.C_dispersion <= 0.5);
    CHECK(rep.lambda_bar * 3.0 * rep.C == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rep.ball_radius == doctest::Approx(2.0 / (9.0 * rep.C)).epsilon(1e-14));
  }
  SUBCASE("report CSV") {
    ContractionReport rep;
    rep.residuals = {1e-3, 1e-5};
    rep.iterate_norms = {1.0, 1.0};
    rep.ratios = {std::nan(""), 1e-2};
    rep.c_values = {std::nan(""), 4e-3};
    summarize_constants(rep);
    CHECK(rep.C == doctest::Approx(4e-3));
    std::ostringstream out;
    write_contraction_csv(out, rep);
    CHECK(out.str().rfind("iter,residual_Y,ratio,C_fit,lambda_bar,ball_radius\n", 0) == 0);
  }
}

TEST_CASE("regularity gain rows") {
  SolverConfig base;
  base.kind = {SystemTag::ElectronMHD, 1.25};
  base.horizon = 0.01;
  base.steps = 8;
  const auto rows = regularity_gain(base, 0.5, 0.05, 3, Distribution::Rademacher, {8, 16});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 8);
  CHECK(rows[1].data_norm_critical > rows[0].data_norm_critical);
  CHECK(rows[1].correction_sup_critical > 0.0);
}
