#include "randhall/app/commands.hpp"

#include "randhall/ensemble_stats.hpp"
#include "randhall/errors.hpp"
#include "randhall/field_factory.hpp"
#include "randhall/io.hpp"
#include "randhall/norms.hpp"
#include "randhall/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#ifndef RANDHALL_VERSION
#define RANDHALL_VERSION "unknown"
#endif

namespace randhall::app {

namespace fs = std::filesystem;

namespace {

std::ofstream open(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StructuralError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::string short_number(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

/// Effective config preceded by the command and code version; feeding it back reproduces the run.
void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
  fs::create_directories(cfg.output);
  std::ofstream out = open(cfg.output / "manifest.ini");
  out << "; command = " << command << "\n"
      << "; version = " << RANDHALL_VERSION << "\n"
      << "; seed = " << cfg.data.seed << "\n";
  write_config(out, cfg);
}

/// Least-squares slope of y against x.
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

Trajectory zero_like(const Trajectory& t) {
  std::vector<SpectralField> fields(t.size(), SpectralField(t.grid_ptr()));
  return Trajectory(t.times(), std::move(fields), t.horizon());
}

Trajectory sum(const Trajectory& a, const Trajectory& b) {
  require_same_nodes(a, b, "sum");
  std::vector<SpectralField> fields;
  for (std::size_t j = 0; j < a.size(); ++j) fields.push_back(a.field(j) + b.field(j));
  return Trajectory(a.times(), std::move(fields), a.horizon());
}

struct CrossMethod {
  double max_rel = 0.0;
  double final_rel = 0.0;
};

/// Per-node Sobolev distance between the two solutions, relative to the reference's sup norm.
CrossMethod compare(std::ostream& out, const char* name, const Trajectory& picard, const Trajectory& etd,
                    double sigma) {
  double scale = 0.0;
  for (const auto& f : etd.fields()) scale = std::max(scale, sobolev_norm(f, sigma));
  CrossMethod c;
  for (std::size_t j = 0; j < picard.size(); ++j) {
    const double d = sobolev_norm(picard.field(j) - etd.field(j), sigma);
    const double rel = scale > 0.0 ? d / scale : d;
    out << picard.time(j) << ',' << name << ',' << sobolev_norm(picard.field(j), sigma) << ','
        << sobolev_norm(etd.field(j), sigma) << ',' << rel << '\n';
    c.max_rel = std::max(c.max_rel, rel);
    c.final_rel = rel;
  }
  return c;
}

SpectralField data_field(const GridPtr& grid, const DataSection& d, double amplitude, std::uint64_t seed) {
  const SpectralField base = power_law_field(grid, d.s, amplitude, d.radius, seed);
  return randomize(base, draw(seed, d.distribution, grid));
}

}  // namespace

SolverConfig solver_config(const ExperimentConfig& cfg) {
  SolverConfig sc;
  sc.kind = cfg.system.kind;
  sc.static_flow = cfg.system.static_flow;
  sc.horizon = cfg.time.horizon;
  sc.p = cfg.exponents.p;
  sc.q = cfg.exponents.q;
  sc.steps = cfg.time.nodes;
  sc.graded = cfg.time.graded;
  sc.grading = cfg.time.grading;
  sc.etd_substeps = cfg.time.etd_substeps;
  sc.picard_tol = cfg.picard.tol;
  sc.max_iterations = cfg.picard.max_iter;
  const GridPtr grid = Grid::make(cfg.grid.n);
  if (sc.kind.tag != SystemTag::NSE) {
    sc.f = data_field(grid, cfg.data, cfg.data.amplitude, cfg.data.seed);
    sc.s_f = cfg.data.s;
  }
  if (sc.kind.tag != SystemTag::ElectronMHD) {
    sc.g = data_field(grid, cfg.data, cfg.data.velocity_amplitude, derive_seed(cfg.data.seed, 1));
    sc.s_g = cfg.data.s;
  }
  validate(sc);
  return sc;
}

int verify_kernels(const ExperimentConfig& cfg) {
  const KernelSection ks = cfg.kernels.value_or(KernelSection{});
  const BetaSection bs = cfg.beta.value_or(BetaSection{});
  write_manifest(cfg, "verify-kernels");
  fs::create_directories(cfg.output / "kernels");
  std::ofstream summary = open(cfg.output / "summary.txt");
  summary << std::setprecision(6);
  bool ok = true;

  std::ofstream table = open(cfg.output / "kernel_summary.csv");
  table << "alpha,m,p,slope,expected,rel_error,status\n";
  for (double a : ks.alpha) {
    for (double m : ks.m) {
      for (double p : ks.p) {
        KernelQuery q{a, m, p, ks.dimension, 1.0};
        const double k1 = kernel_norm(q);
        const double expected = kernel_scaling_exponent(q);
        const std::string name =
            "kernel_alpha" + short_number(a) + "_m" + short_number(m) + "_p" + short_number(p) + ".csv";
        std::ofstream csv = open(cfg.output / "kernels" / name);
        csv << "t,kernel_norm,predicted\n";
        std::vector<double> lt, lk;
        for (int j = ks.log2_t_min; j <= ks.log2_t_max; ++j) {
          q.t = std::ldexp(1.0, j);
          const double k = kernel_norm(q);
          csv << q.t << ',' << k << ',' << k1 * std::pow(q.t, expected) << '\n';
          lt.push_back(std::log(q.t));
          lk.push_back(std::log(k));
        }
        const double slope = fit_slope(lt, lk);
        const double rel = std::abs(slope - expected) / std::abs(expected);
        const bool pass = rel <= ks.slope_tol;
        ok = ok && pass;
        table << a << ',' << m << ',' << p << ',' << slope << ',' << expected << ',' << rel << ','
              << (pass ? "PASS" : "FAIL") << '\n';
        if (a == 1.0 && m == 0.0 && p == 2.0 && ks.dimension == 3) {
          const double exact = std::pow(std::numbers::pi / 2.0, 0.75);
          const bool hit = std::abs(k1 - exact) <= 1e-6;
          ok = ok && hit;
          summary << "kernel norm at t = 1 (alpha 1, m 0, p 2): " << k1 << " vs (pi/2)^(3/4) = " << exact << " "
                  << (hit ? "PASS" : "FAIL") << '\n';
        }
      }
    }
  }

  std::ofstream beta = open(cfg.output / "beta.csv");
  beta << "r,s,t,value,oracle,abs_error\n";
  for (std::size_t i = 0; i < bs.r.size(); ++i) {
    const double r = bs.r[i], s = bs.s[i];
    const double gamma = std::tgamma(1 - r) * std::tgamma(1 - s) / std::tgamma(2 - r - s);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, worst = 0.0;
    for (double t : bs.t) {
      const double v = beta_time_integral(r, s, t);
      const double oracle = gamma * std::pow(t, 1 - r - s);
      beta << r << ',' << s << ',' << t << ',' << v << ',' << oracle << ',' << std::abs(v - oracle) << '\n';
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      worst = std::max(worst, std::abs(v - oracle));
    }
    const bool pass = hi - lo <= bs.invariance_tol && worst <= bs.oracle_tol;
    ok = ok && pass;
    summary << "beta integral r = " << r << ", s = " << s << ": spread over t " << hi - lo << ", oracle error " << worst
            << " " << (pass ? "PASS" : "FAIL") << '\n';
  }
  summary << "kernel slopes: see kernel_summary.csv\n" << (ok ? "all checks passed\n" : "some checks FAILED\n");
  std::cerr << (ok ? "verify-kernels: all checks passed\n" : "verify-kernels: some checks failed\n");
  return ok ? kSuccess : kCheckFailed;
}

int simulate(const ExperimentConfig& cfg) {
  const SolverConfig sc = solver_config(cfg);
  const ExponentReport e = validate(sc);
  write_manifest(cfg, "simulate");
  const fs::path dir = cfg.output;

  PicardResult pr;
  try {
    pr = picard_solve(sc);
  } catch (const ConvergenceFailure& failure) {
    std::ofstream hist = open(dir / "residual_history.csv");
    hist << "iter,residual_Y\n";
    for (std::size_t i = 0; i < failure.residuals().size(); ++i) hist << i + 1 << ',' << failure.residuals()[i] << '\n';
    throw;
  }
  {
    std::ofstream csv = open(dir / "contraction.csv");
    write_contraction_csv(csv, pr.report);
  }

  const std::vector<double> times = time_nodes(sc);
  StateTrajectories total;
  if (sc.f) {
    total.B = sum(free_evolution(*sc.f, e.alpha, times, sc.horizon), *pr.correction.B);
    io::save_trajectory(dir / "H.strj", *pr.correction.B);
    io::save_trajectory(dir / "B.strj", *total.B);
  }
  if (sc.g) {
    const Trajectory free_u = free_evolution(*sc.g, e.alpha, times, sc.horizon);
    total.u = pr.correction.u ? sum(free_u, *pr.correction.u) : free_u;
    if (pr.correction.u) io::save_trajectory(dir / "V.strj", *pr.correction.u);
    io::save_trajectory(dir / "u.strj", *total.u);
  }

  const StateTrajectories etd = etd_integrate(sc);
  CrossMethod cross_B, cross_u;
  {
    std::ofstream csv = open(dir / "cross_method.csv");
    csv << "t,field,picard_norm,etd_norm,rel_diff\n";
    if (total.B) {
      io::save_trajectory(dir / "etd_B.strj", *etd.B);
      cross_B = compare(csv, "B", *total.B, *etd.B, 3.5 - 2.0 * e.alpha);
    }
    if (total.u) {
      io::save_trajectory(dir / "etd_u.strj", *etd.u);
      cross_u = compare(csv, "u", *total.u, *etd.u, 2.5 - 2.0 * e.alpha);
    }
  }

  const Trajectory& any = etd.B ? *etd.B : *etd.u;
  const EnergyBalanceReport energy =
      energy_balance(etd.u ? *etd.u : zero_like(any), etd.B ? *etd.B : zero_like(any), e.alpha);
  {
    std::ofstream csv = open(dir / "energy.csv");
    csv << "t_mid,energy_rate,dissipation,residual\n";
    for (std::size_t j = 0; j < energy.midpoints.size(); ++j)
      csv << energy.midpoints[j] << ',' << energy.energy_rate[j] << ',' << energy.dissipation[j] << ','
          << energy.residual[j] << '\n';
  }

  std::vector<RegularityGainRow> gain;
  if (cfg.simulate.regularity_gain) {
    gain = regularity_gain(sc, cfg.data.s, cfg.data.amplitude, cfg.data.seed, cfg.data.distribution,
                           cfg.simulate.resolutions);
    std::ofstream csv = open(dir / "regularity_gain.csv");
    csv << "n,data_norm_s,data_norm_critical,correction_sup_critical,iterations\n";
    for (const auto& r : gain)
      csv << r.n << ',' << r.data_norm_s << ',' << r.data_norm_critical << ',' << r.correction_sup_critical << ','
          << r.iterations << '\n';
  }

  std::ofstream summary = open(dir / "summary.txt");
  summary << std::setprecision(6);
  summary << "system " << to_string(sc.kind.tag) << ", alpha " << e.alpha << ", N " << cfg.grid.n << ", T "
          << sc.horizon << "\n";
  if (sc.f) summary << "p " << e.p << ", beta " << e.beta << ", eta " << e.eta << (e.eta_window_empty ? " (window empty)" : "") << "\n";
  if (sc.g) summary << "q " << e.q << ", gamma " << e.gamma << ", zeta " << e.zeta << (e.zeta_window_empty ? " (window empty)" : "") << "\n";
  const ContractionReport& r = pr.report;
  summary << "picard: converged after " << r.iterations << " iterations, rho " << r.rho << ", C " << r.C
          << ", lambda_bar " << r.lambda_bar << ", ball radius " << r.ball_radius << ", free data size "
          << r.free_norm << "\n";
  if (total.B) summary << "cross-method B: max relative gap " << cross_B.max_rel << ", at T " << cross_B.final_rel << "\n";
  if (total.u) summary << "cross-method u: max relative gap " << cross_u.max_rel << ", at T " << cross_u.final_rel << "\n";
  summary << "energy balance: max |residual| " << energy.max_abs_residual << "\n";
  for (const auto& g : gain)
    summary << "regularity gain N " << g.n << ": |f|_crit " << g.data_norm_critical << ", sup |H|_crit "
            << g.correction_sup_critical << "\n";
  std::cerr << "simulate: converged in " << r.iterations << " iterations; outputs in " << dir.string() << "\n";
  return kSuccess;
}

int ensemble(const ExperimentConfig& cfg) {
  if (!cfg.ensemble) throw ConfigError("the ensemble command needs an [ensemble] section");
  const EnsembleSection& es = *cfg.ensemble;
  const SolverConfig sc = solver_config(cfg);
  const ExponentReport e = validate(sc);
  const bool magnetic = es.field == "magnetic";

  EnsembleConfig ec;
  ec.base_seed = cfg.data.seed;
  ec.n_draws = es.n_draws;
  ec.distribution = cfg.data.distribution;
  ec.data = power_law_field(Grid::make(cfg.grid.n), cfg.data.s,
                            magnetic ? cfg.data.amplitude : cfg.data.velocity_amplitude, cfg.data.radius,
                            cfg.data.seed);
  ec.alpha = e.alpha;
  ec.s = cfg.data.s;
  ec.horizon = cfg.time.horizon;
  ec.steps = cfg.time.nodes;
  ec.grading = cfg.time.graded ? cfg.time.grading : 1.0;
  ec.norms = magnetic ? magnetic_event_norms(e) : velocity_event_norms(e);
  ec.statistic = -1;
  for (std::size_t i = 0; i < ec.norms.size(); ++i)
    if (ec.norms[i].name == es.statistic) ec.statistic = static_cast<int>(i);
  ec.lambda_grid = es.lambda_grid;
  ec.r_list = es.r_list;
  validate(ec);
  write_manifest(cfg, "ensemble");

  const std::vector<DrawRecord> records = free_evolution_norms(ec);
  std::size_t failed = 0;
  double largest = 0.0;
  for (const auto& rec : records) {
    if (!rec.ok) ++failed;
    else largest = std::max(largest, statistic(ec, rec));
  }
  {
    std::ofstream csv = open(cfg.output / "records.csv");
    write_records_csv(csv, ec, records);
  }

  std::ofstream summary = open(cfg.output / "summary.txt");
  summary << std::setprecision(6);
  summary << "draws " << records.size() << ", failed " << failed << ", statistic " << es.statistic << " of the "
          << es.field << " event norms\n";
  if (ec.lambda_grid.empty()) {
    for (int i = 1; i <= 40; ++i) ec.lambda_grid.push_back(largest * i / 40.0);
  }
  if (ec.n_draws >= 1000 && largest > 0.0) {
    const TailReport tail = tail_estimate(ec, records);
    std::ofstream csv = open(cfg.output / "tail.csv");
    write_tail_csv(csv, tail);
    summary << "tail fit over " << tail.fitted_bins << " bins: slope " << tail.slope << ", R^2 " << tail.r_squared
            << ", c1 " << tail.c1 << ", c2 " << tail.c2 << ", |f|_{H^s} " << tail.data_norm << "\n";
  } else {
    summary << "tail estimate skipped (needs at least 1000 draws and nonzero data)\n";
  }
  double r_max = 0.0;
  for (double r : ec.r_list) r_max = std::max(r_max, r);
  if (!ec.r_list.empty() && static_cast<double>(ec.n_draws) >= std::max(100.0, 50.0 * r_max)) {
    const auto moments = free_evolution_norm_stats(ec, records);
    std::ofstream csv = open(cfg.output / "moments.csv");
    write_moment_csv(csv, moments);
    for (const auto& m : moments)
      summary << "moment r = " << m.r << ": " << m.moment << ", ratio to sqrt(r)|f| " << m.ratio_sqrt_r << "\n";
  } else if (!ec.r_list.empty()) {
    summary << "moments skipped (needs at least max(100, 50 r_max) draws)\n";
  }

  const bool partial = static_cast<double>(failed) > 0.01 * static_cast<double>(records.size());
  std::cerr << "ensemble: " << records.size() - failed << "/" << records.size() << " draws succeeded\n";
  return partial ? kPartialEnsembleFailure : kSuccess;
}

int contraction(const ExperimentConfig& cfg) {
  const SolverConfig sc = solver_config(cfg);
  write_manifest(cfg, "contraction");
  const ContractionReport rep =
      contraction_probe_ensemble(sc, cfg.contraction.pairs, cfg.contraction.amplitude, cfg.data.seed);
  {
    std::ofstream csv = open(cfg.output / "contraction.csv");
    write_contraction_csv(csv, rep);
  }
  std::ofstream summary = open(cfg.output / "summary.txt");
  summary << std::setprecision(6);
  summary << "probes " << rep.residuals.size() << ", skipped " << rep.skipped << "\n"
          << "C " << rep.C << ", dispersion " << rep.C_dispersion << "\n"
          << "lambda_bar " << rep.lambda_bar << ", 3 C lambda_bar " << 3.0 * rep.C * rep.lambda_bar << "\n"
          << "ball radius " << rep.ball_radius << "\n"
          << "free data size " << rep.free_norm << "\n";
  std::cerr << "contraction: C = " << rep.C << " (dispersion " << rep.C_dispersion << ")\n";
  return kSuccess;
}

int run(const std::string& command, const std::string& config_path, const Overrides& overrides) {
  try {
    const ExperimentConfig cfg = load_config(config_path, overrides);
    if (command == "verify-kernels") return verify_kernels(cfg);
    if (command == "simulate") return simulate(cfg);
    if (command == "ensemble") return ensemble(cfg);
    if (command == "contraction") return contraction(cfg);
    throw ConfigError("unknown command " + command);
  } catch (const InfeasibleParameters& e) {
    std::cerr << "infeasible parameters (" << e.relation() << "): " << e.what() << "\n";
    return kSolverFailure;
  } catch (const ConvergenceFailure& e) {
    std::cerr << "convergence failure: " << e.what() << " (residual history written)\n";
    return kSolverFailure;
  } catch (const BlowUp& e) {
    std::cerr << "blow-up at t = " << e.time() << ": " << e.what() << "\n";
    return kSolverFailure;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kValidationError;
  } catch (const DomainError& e) {
    std::cerr << "invalid parameters: " << e.what() << "\n";
    return kValidationError;
  } catch (const PreconditionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kValidationError;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationError;
  }
}

}  // namespace randhall::app
