#include "randhall/mild_solver.hpp"

#include "randhall/errors.hpp"
#include "randhall/field_factory.hpp"
#include "randhall/norms.hpp"
#include "randhall/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace randhall {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kBlowUpFactor = 1e6;

// (1 - e^{-z} - z e^{-z}) / z^2, with its Taylor series where the closed form cancels.
double phi_lower(double z) {
  if (z < 0.5) {
    double term = 0.5;
    double sum = 0.0;
    for (int n = 2; n < 24; ++n) {
      sum += term;
      term *= -z * static_cast<double>(n) / (static_cast<double>(n - 1) * (n + 1));
    }
    return sum;
  }
  const double e = std::exp(-z);
  return (1.0 - e - z * e) / (z * z);
}

// (1 - e^{-z}) / z.
double phi_one(double z) { return z == 0.0 ? 1.0 : -std::expm1(-z) / z; }

// Per-mode weights of one product-integration panel of width h:
//   out_{j+1} = e out_j + c0 N_j + c1 N_{j+1}, exact for N linear on the panel.
class PanelWeights {
 public:
  PanelWeights(const Grid& g, double alpha) : grid_(g) {
    rate_.resize(g.max_k_squared() + 1);
    for (int s = 0; s <= g.max_k_squared(); ++s) rate_[s] = std::pow(static_cast<double>(s), alpha);
    e_.resize(g.size());
    c0_.resize(g.size());
    c1_.resize(g.size());
  }

  void set_step(double h) {
    const std::size_t shells = rate_.size();
    std::vector<double> e(shells), c0(shells), c1(shells);
    for (std::size_t s = 0; s < shells; ++s) {
      const double z = h * rate_[s];
      const double lower = phi_lower(z);
      e[s] = std::exp(-z);
      c0[s] = h * lower;
      c1[s] = h * (phi_one(z) - lower);
    }
    const Eigen::ArrayXi& shell = grid_.k_squared_int();
    for (Eigen::Index i = 0; i < grid_.size(); ++i) {
      e_(i) = e[shell(i)];
      c0_(i) = c0[shell(i)];
      c1_(i) = c1[shell(i)];
    }
  }

  void advance(Coefficients& out, const Coefficients& n0, const Coefficients& n1) const {
    for (int c = 0; c < 3; ++c) out.col(c) = e_ * out.col(c) + c0_ * n0.col(c) + c1_ * n1.col(c);
  }

  // ETD predictor e u + (c0 + c1) N.
  Coefficients predict(const Coefficients& u, const Coefficients& n0) const {
    Coefficients a(u.rows(), 3);
    for (int c = 0; c < 3; ++c) a.col(c) = e_ * u.col(c) + (c0_ + c1_) * n0.col(c);
    return a;
  }

 private:
  const Grid& grid_;
  std::vector<double> rate_;
  Eigen::ArrayXd e_, c0_, c1_;
};

struct Activity {
  bool u = false;
  bool B = false;
};

// Which components the Duhamel map / integrator evolves.
Activity evolved(const SolverConfig& cfg) {
  switch (cfg.kind.tag) {
    case SystemTag::NSE: return {true, false};
    case SystemTag::ElectronMHD: return {false, true};
    case SystemTag::HallMHD: return {!cfg.static_flow, true};
  }
  return {};
}

const GridPtr& data_grid(const SolverConfig& cfg) { return cfg.f ? cfg.f->grid_ptr() : cfg.g->grid_ptr(); }

SpectralField free_at(const std::optional<SpectralField>& data, const GridPtr& grid, double t, double alpha) {
  return data ? propagate(*data, t, alpha) : SpectralField(grid);
}

// Totals entering the nonlinearity at node j.
using TotalFields = std::function<FieldPair(std::size_t)>;

TotalFields totals(const SolverConfig& cfg, const std::vector<double>& times, const StateTrajectories* candidate) {
  const GridPtr grid = data_grid(cfg);
  return [&cfg, &times, candidate, grid](std::size_t j) {
    FieldPair p{free_at(cfg.g, grid, times[j], cfg.kind.alpha), free_at(cfg.f, grid, times[j], cfg.kind.alpha)};
    if (candidate && candidate->u) p.u += candidate->u->field(j);
    if (candidate && candidate->B) p.B += candidate->B->field(j);
    return p;
  };
}

StateTrajectories run_map(const SolverConfig& cfg, const std::vector<double>& times, const TotalFields& total) {
  const Activity act = evolved(cfg);
  const GridPtr grid = data_grid(cfg);
  PanelWeights weights(*grid, cfg.kind.alpha);
  std::vector<SpectralField> out_u, out_B;
  if (act.u) out_u.emplace_back(grid);
  if (act.B) out_B.emplace_back(grid);

  auto nonlinear = [&](std::size_t j) {
    const FieldPair p = total(j);
    return nonlinear_terms(cfg.kind.tag, p.u, p.B);
  };
  FieldPair prev = nonlinear(0);
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    FieldPair next = nonlinear(j + 1);
    weights.set_step(times[j + 1] - times[j]);
    if (act.u) {
      SpectralField v = out_u.back();
      weights.advance(v.coeffs(), prev.u.coeffs(), next.u.coeffs());
      out_u.push_back(std::move(v));
    }
    if (act.B) {
      SpectralField h = out_B.back();
      weights.advance(h.coeffs(), prev.B.coeffs(), next.B.coeffs());
      out_B.push_back(std::move(h));
    }
    prev = std::move(next);
  }
  StateTrajectories s;
  if (act.u) s.u.emplace(times, std::move(out_u), cfg.horizon);
  if (act.B) s.B.emplace(times, std::move(out_B), cfg.horizon);
  return s;
}

// Per-sample space norms feeding the X / Y norms.
struct Samples {
  std::vector<double> sobolev;
  std::vector<double> lebesgue;
};

void add_sample(Samples& s, const SpectralField& f, double sigma, double p) {
  s.sobolev.push_back(sobolev_norm(f, sigma));
  s.lebesgue.push_back(lp_norm(f, p));
}

double combine(const std::vector<double>& times, const std::vector<double>& weights, const Samples& s,
               double exponent) {
  const double sup = *std::max_element(s.sobolev.begin(), s.sobolev.end());
  const double weighted = time_norm(times, weights, s.lebesgue, exponent, 1.0 / exponent);
  const double plain = time_norm(times, weights, s.lebesgue, 0.0, 1.0 / (2.0 * exponent));
  return std::max({sup, weighted, plain});
}

double y_sigma(const ExponentReport& e) { return 3.5 - 2.0 * e.alpha; }
double x_sigma(const ExponentReport& e) { return 2.5 - 2.0 * e.alpha; }

// ||a - b|| and ||a|| over the evolved components, without materializing a - b.
std::pair<double, double> difference_and_norm(const StateTrajectories& a, const StateTrajectories* b,
                                              const ExponentReport& e) {
  double diff = 0.0;
  double norm = 0.0;
  auto handle = [&](const Trajectory& ta, const Trajectory* tb, double sigma, double p, double exponent) {
    Samples sd, sn;
    for (std::size_t j = 0; j < ta.size(); ++j) {
      add_sample(sn, ta.field(j), sigma, p);
      add_sample(sd, tb ? ta.field(j) - tb->field(j) : ta.field(j), sigma, p);
    }
    diff += combine(ta.times(), ta.weights(), sd, exponent);
    norm += combine(ta.times(), ta.weights(), sn, exponent);
  };
  if (a.u) handle(*a.u, b && b->u ? &*b->u : nullptr, x_sigma(e), e.q, e.gamma);
  if (a.B) handle(*a.B, b && b->B ? &*b->B : nullptr, y_sigma(e), e.p, e.beta);
  return {diff, norm};
}

using Sampler = std::function<FieldPair(std::size_t)>;

double free_size(const std::vector<double>& times, const std::vector<double>& weights, const Sampler& sample,
                 bool has_u, bool has_B, const ExponentReport& e) {
  Samples u_samples, b_samples;
  for (std::size_t j = 0; j < times.size(); ++j) {
    const FieldPair p = sample(j);
    if (has_u) add_sample(u_samples, p.u, 3.5 - 2.0 * e.alpha, e.q);
    if (has_B) add_sample(b_samples, p.B, 5.5 - 2.0 * e.alpha, e.p);
  }
  double total = 0.0;
  if (has_B) {
    total += time_norm(times, weights, b_samples.lebesgue, 0.0, 1.0 / (2.0 * e.beta));
    total += time_norm(times, weights, b_samples.lebesgue, e.beta, 1.0 / e.beta);
    total += time_norm(times, weights, b_samples.sobolev, e.eta, 2.0);
  }
  if (has_u) {
    total += time_norm(times, weights, u_samples.lebesgue, 0.0, 1.0 / (2.0 * e.gamma));
    total += time_norm(times, weights, u_samples.lebesgue, e.gamma, 1.0 / e.gamma);
    total += time_norm(times, weights, u_samples.sobolev, e.zeta, 4.0);
  }
  return total;
}

double config_free_size(const SolverConfig& cfg, const std::vector<double>& times, const ExponentReport& e) {
  const GridPtr grid = data_grid(cfg);
  const double alpha = cfg.kind.alpha;
  const Sampler sample = [&](std::size_t j) {
    return FieldPair{free_at(cfg.g, grid, times[j], alpha), free_at(cfg.f, grid, times[j], alpha)};
  };
  const bool has_u = cfg.g.has_value() && cfg.kind.tag != SystemTag::ElectronMHD;
  const bool has_B = cfg.f.has_value() && cfg.kind.tag != SystemTag::NSE;
  return free_size(times, trapezoid_weights(times, cfg.horizon), sample, has_u, has_B, e);
}

double l2(const SpectralField& f) { return std::sqrt(f.coeffs().abs2().sum()); }

void require_compatible(const SolverConfig& cfg, const StateTrajectories& s, const std::vector<double>& times,
                        const char* where) {
  const Activity act = evolved(cfg);
  for (const auto* t : {s.u ? &*s.u : nullptr, s.B ? &*s.B : nullptr}) {
    if (!t) continue;
    if (t->times() != times) throw StructuralError(std::string(where) + ": trajectory nodes differ from the config");
    require_same_grid(*t->grid_ptr(), *data_grid(cfg), where);
  }
  if ((s.u.has_value() && !act.u) || (s.B.has_value() && !act.B)) {
    throw StructuralError(std::string(where) + ": candidate carries a component the system does not evolve");
  }
}

}  // namespace

ExponentReport parameter_feasibility(double alpha, double p, double q) {
  ExponentReport e = exponents_for(SystemTag::HallMHD, alpha, p, q);
  return e;
}

ExponentReport exponents_for(SystemTag tag, double alpha, double p, double q) {
  validate(SystemKind{tag, alpha});
  if (!(p >= 2.0) || !(q >= 2.0)) throw DomainError("Lebesgue exponents p and q must be >= 2");
  ExponentReport e;
  e.alpha = alpha;
  e.p = p;
  e.q = q;
  e.beta = 0.5 * (1.0 - 1.0 / alpha - 3.0 / (2.0 * p * alpha));
  e.gamma = 0.5 * (1.0 - 1.0 / (2.0 * alpha) - 3.0 / (2.0 * q * alpha));
  const bool need_beta = tag != SystemTag::NSE;
  const bool need_gamma = tag != SystemTag::ElectronMHD;
  if (need_beta && !(e.beta > 0.0)) {
    std::ostringstream msg;
    msg << "infeasible exponents: " << kMagneticRelation << " gives beta = " << e.beta << " <= 0 at alpha = " << alpha
        << ", p = " << p;
    throw InfeasibleParameters(kMagneticRelation, msg.str());
  }
  if (need_gamma && !(e.gamma > 0.0)) {
    std::ostringstream msg;
    msg << "infeasible exponents: " << kVelocityRelation << " gives gamma = " << e.gamma << " <= 0 at alpha = " << alpha
        << ", q = " << q;
    throw InfeasibleParameters(kVelocityRelation, msg.str());
  }
  e.eta_lo = std::max(0.0, 1.0 / alpha - 0.5);
  e.eta_hi = std::min(0.5 - 2.0 * e.beta, 0.5);
  e.eta_window_empty = !(e.eta_hi > e.eta_lo);
  if (!e.eta_window_empty) e.eta = 0.5 * (e.eta_lo + e.eta_hi);
  e.zeta_lo = 1.0 / (2.0 * alpha) + e.gamma / 4.0;
  e.zeta_hi = std::min(1.0 - 1.75 * e.gamma, 0.5);
  e.zeta_window_empty = !(e.zeta_hi > e.zeta_lo);
  if (!e.zeta_window_empty) e.zeta = 0.5 * (e.zeta_lo + e.zeta_hi);
  return e;
}

double magnetic_data_threshold(double alpha) { return std::max(5.5 - 4.0 * alpha, 2.5 - 2.0 * alpha); }
double velocity_data_threshold(double alpha) { return std::max(3.5 - 3.5 * alpha, 1.5 - 2.0 * alpha); }

ExponentReport validate(const SolverConfig& cfg) {
  const ExponentReport e = exponents_for(cfg.kind.tag, cfg.kind.alpha, cfg.p, cfg.q);
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw DomainError("horizon T must be positive");
  if (cfg.steps < 1) throw DomainError("at least one time step is required");
  if (cfg.etd_substeps < 1) throw DomainError("etd_substeps must be positive");
  if (cfg.graded && !(cfg.grading >= 1.0)) throw DomainError("node grading must be >= 1");
  if (!(cfg.picard_tol > 0.0)) throw DomainError("picard_tol must be positive");
  if (cfg.max_iterations < 1) throw DomainError("max_iterations must be positive");
  if (cfg.static_flow && cfg.kind.tag != SystemTag::HallMHD) {
    throw DomainError("static_flow only applies to the coupled Hall MHD system");
  }
  const bool need_f = cfg.kind.tag != SystemTag::NSE;
  const bool need_g = cfg.kind.tag != SystemTag::ElectronMHD;
  if (need_f && !cfg.f) throw PreconditionError("magnetic data f is required for " + to_string(cfg.kind.tag));
  if (need_g && !cfg.g) throw PreconditionError("velocity data g is required for " + to_string(cfg.kind.tag));
  if (cfg.f && cfg.g) require_same_grid(cfg.f->grid(), cfg.g->grid(), "solver data");
  for (const auto* d : {cfg.f ? &*cfg.f : nullptr, cfg.g ? &*cfg.g : nullptr}) {
    if (!d) continue;
    if (!d->is_div_free(1e-10)) throw PreconditionError("initial data must be divergence-free");
    if (!d->is_dealiased()) throw PreconditionError("initial data must be dealiased");
  }
  if (need_f && std::isfinite(cfg.s_f) && cfg.s_f < magnetic_data_threshold(cfg.kind.alpha) - 1e-12) {
    throw InfeasibleParameters("s >= max{11/2 - 4α, 5/2 - 2α}", "magnetic data regularity below the threshold");
  }
  if (need_g && std::isfinite(cfg.s_g) && cfg.s_g < velocity_data_threshold(cfg.kind.alpha) - 1e-12) {
    throw InfeasibleParameters("s >= max{7/2 - 7α/2, 3/2 - 2α}", "velocity data regularity below the threshold");
  }
  return e;
}

std::vector<double> time_nodes(const SolverConfig& cfg) {
  return cfg.graded ? graded_nodes(cfg.horizon, cfg.steps, cfg.grading) : uniform_nodes(cfg.horizon, cfg.steps);
}

Trajectory free_evolution(const SpectralField& data, double alpha, const std::vector<double>& times, double horizon) {
  std::vector<SpectralField> fields;
  fields.reserve(times.size());
  for (double t : times) fields.push_back(propagate(data, t, alpha));
  return Trajectory(times, std::move(fields), horizon);
}

Trajectory duhamel_quadrature(const std::vector<double>& times, double horizon, double alpha,
                              const std::function<SpectralField(std::size_t)>& forcing) {
  if (times.empty() || times.front() != 0.0) throw StructuralError("duhamel_quadrature: nodes must start at t = 0");
  SpectralField prev = forcing(0);
  const GridPtr grid = prev.grid_ptr();
  PanelWeights weights(*grid, alpha);
  std::vector<SpectralField> out;
  out.reserve(times.size());
  out.emplace_back(grid);
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    SpectralField next = forcing(j + 1);
    require_same_grid(next.grid(), *grid, "duhamel_quadrature");
    weights.set_step(times[j + 1] - times[j]);
    SpectralField v = out.back();
    weights.advance(v.coeffs(), prev.coeffs(), next.coeffs());
    out.push_back(std::move(v));
    prev = std::move(next);
  }
  return Trajectory(times, std::move(out), horizon);
}

StateTrajectories duhamel_apply(const SolverConfig& cfg, const StateTrajectories& candidate,
                                const StateTrajectories& free) {
  validate(cfg);
  const std::vector<double> times = time_nodes(cfg);
  require_compatible(cfg, candidate, times, "duhamel_apply");
  for (const auto* t : {free.u ? &*free.u : nullptr, free.B ? &*free.B : nullptr}) {
    if (t && t->times() != times) throw StructuralError("duhamel_apply: free trajectory nodes differ from the config");
  }
  const GridPtr grid = data_grid(cfg);
  const TotalFields total = [&](std::size_t j) {
    FieldPair p{free.u ? free.u->field(j) : SpectralField(grid), free.B ? free.B->field(j) : SpectralField(grid)};
    if (candidate.u) p.u += candidate.u->field(j);
    if (candidate.B) p.B += candidate.B->field(j);
    return p;
  };
  return run_map(cfg, times, total);
}

double y_norm(const Trajectory& H, const ExponentReport& e) {
  Samples s;
  for (const auto& f : H.fields()) add_sample(s, f, y_sigma(e), e.p);
  return combine(H.times(), H.weights(), s, e.beta);
}

double x_norm(const Trajectory& V, const ExponentReport& e) {
  Samples s;
  for (const auto& f : V.fields()) add_sample(s, f, x_sigma(e), e.q);
  return combine(V.times(), V.weights(), s, e.gamma);
}

double state_norm(const StateTrajectories& s, const ExponentReport& e) {
  return difference_and_norm(s, nullptr, e).second;
}

double free_data_size(const StateTrajectories& free, const ExponentReport& e) {
  const Trajectory& ref = free.B ? *free.B : *free.u;
  const GridPtr grid = ref.grid_ptr();
  const Sampler sample = [&](std::size_t j) {
    return FieldPair{free.u ? free.u->field(j) : SpectralField(grid), free.B ? free.B->field(j) : SpectralField(grid)};
  };
  return free_size(ref.times(), ref.weights(), sample, free.u.has_value(), free.B.has_value(), e);
}

void summarize_constants(ContractionReport& r) {
  std::vector<double> c;
  for (double v : r.c_values) {
    if (std::isfinite(v) && v > 0.0) c.push_back(v);
  }
  if (c.empty()) {
    r.C = 0.0;
    r.C_dispersion = 0.0;
    r.lambda_bar = kInfinity;
    r.ball_radius = kInfinity;
    return;
  }
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
  double var = 0.0;
  for (double v : c) var += (v - mean) * (v - mean);
  var = c.size() > 1 ? var / static_cast<double>(c.size() - 1) : 0.0;
  r.C = mean;
  r.C_dispersion = std::sqrt(var) / mean;
  r.lambda_bar = 1.0 / (3.0 * r.C);
  r.ball_radius = 2.0 * r.C * r.lambda_bar * r.lambda_bar;
}

void write_contraction_csv(std::ostream& out, const ContractionReport& r) {
  out << "iter,residual_Y,ratio,C_fit,lambda_bar,ball_radius\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < r.residuals.size(); ++i) {
    const double c = i < r.c_values.size() ? r.c_values[i] : kNaN;
    const double lb = std::isfinite(c) && c > 0.0 ? 1.0 / (3.0 * c) : kNaN;
    const double ball = std::isfinite(lb) ? 2.0 * c * lb * lb : kNaN;
    out << i << ',' << r.residuals[i] << ',' << (i < r.ratios.size() ? r.ratios[i] : kNaN) << ',' << c << ','
        << lb << ',' << ball << '\n';
  }
}

PicardResult picard_solve(const SolverConfig& cfg) {
  PicardResult result;
  result.exponents = validate(cfg);
  const ExponentReport& e = result.exponents;
  const std::vector<double> times = time_nodes(cfg);
  ContractionReport& rep = result.report;
  rep.free_norm = config_free_size(cfg, times, e);

  std::optional<StateTrajectories> current;  // empty stands for the zero iterate
  double current_norm = 0.0;
  double previous_norm = 0.0;
  for (int n = 0; n < cfg.max_iterations; ++n) {
    StateTrajectories next = run_map(cfg, times, totals(cfg, times, current ? &*current : nullptr));
    // ||Phi(H_n) - H_n|| and ||Phi(H_n)||.
    const auto [residual, next_norm] = difference_and_norm(next, current ? &*current : nullptr, e);
    rep.residuals.push_back(residual);
    rep.iterate_norms.push_back(current_norm);
    if (n == 0) {
      rep.ratios.push_back(kNaN);
      rep.c_values.push_back(kNaN);
    } else {
      const double prev = rep.residuals[n - 1];
      const double ratio = prev > 0.0 ? residual / prev : kNaN;
      rep.ratios.push_back(ratio);
      rep.c_values.push_back(ratio / (current_norm + previous_norm + rep.free_norm));
    }
    rep.iterations = n + 1;
    if (residual == 0.0 || residual <= cfg.picard_tol * current_norm) {
      rep.converged = true;
      // With a zero residual the next iterate equals the current one.
      result.correction = current ? std::move(*current) : std::move(next);
      break;
    }
    previous_norm = current_norm;
    current_norm = next_norm;
    current = std::move(next);
  }

  // Geometric fit of log r_n against n, skipping the first iterate when enough points remain.
  std::vector<double> xs, ys;
  const std::size_t first = rep.residuals.size() > 2 ? 1 : 0;
  for (std::size_t i = first; i < rep.residuals.size(); ++i) {
    if (rep.residuals[i] > 0.0) {
      xs.push_back(static_cast<double>(i));
      ys.push_back(std::log(rep.residuals[i]));
    }
  }
  if (xs.size() >= 2) {
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    rep.rho = std::exp(sxy / sxx);
  }
  summarize_constants(rep);

  if (!rep.converged) {
    std::ostringstream msg;
    msg << "Picard iteration did not reach tolerance " << cfg.picard_tol << " in " << cfg.max_iterations
        << " iterations (last residual " << rep.residuals.back() << ", fitted ratio " << rep.rho << ")";
    throw ConvergenceFailure(msg.str(), rep.residuals);
  }
  return result;
}

StateTrajectories etd_integrate(const SolverConfig& cfg, const Forcing& forcing) {
  validate(cfg);
  const std::vector<double> times = time_nodes(cfg);
  const Activity act = evolved(cfg);
  const GridPtr grid = data_grid(cfg);
  const double alpha = cfg.kind.alpha;
  PanelWeights weights(*grid, alpha);

  SpectralField u = cfg.g ? *cfg.g : SpectralField(grid);
  SpectralField B = cfg.f ? *cfg.f : SpectralField(grid);
  const double u0 = l2(u);
  const double b0 = l2(B);

  // Velocity seen by the nonlinearity: evolved, or frozen at the free flow.
  auto velocity_at = [&](double t, const SpectralField& state) {
    if (act.u || !cfg.g) return state;
    return propagate(*cfg.g, t, alpha);
  };
  auto evaluate = [&](double t, const SpectralField& uu, const SpectralField& bb) {
    FieldPair n = cfg.kind.tag == SystemTag::NSE ? nonlinear_terms(cfg.kind.tag, uu, uu)
                                                 : nonlinear_terms(cfg.kind.tag, uu, bb);
    if (forcing) {
      const FieldPair extra = forcing(t);
      if (act.u) n.u += extra.u;
      if (act.B) n.B += extra.B;
    }
    return n;
  };
  auto guard = [&](const SpectralField& f, double initial, double t) {
    const double norm = l2(f);
    if (!std::isfinite(norm) || (initial > 0.0 && norm > kBlowUpFactor * initial)) {
      std::ostringstream msg;
      msg << "field L^2 norm " << norm << " exceeded the overflow guard at t = " << t;
      throw BlowUp(msg.str(), t);
    }
  };

  std::vector<SpectralField> rec_u, rec_B;
  if (act.u) rec_u.push_back(u);
  if (act.B) rec_B.push_back(B);
  for (std::size_t j = 0; j + 1 < times.size(); ++j) {
    const double h = (times[j + 1] - times[j]) / cfg.etd_substeps;
    weights.set_step(h);
    for (int sub = 0; sub < cfg.etd_substeps; ++sub) {
      const double t0 = times[j] + sub * h;
      const double t1 = sub + 1 == cfg.etd_substeps ? times[j + 1] : t0 + h;
      const FieldPair n0 = evaluate(t0, velocity_at(t0, u), B);
      SpectralField au(grid), aB(grid);
      if (act.u) au.coeffs() = weights.predict(u.coeffs(), n0.u.coeffs());
      if (act.B) aB.coeffs() = weights.predict(B.coeffs(), n0.B.coeffs());
      const FieldPair n1 = evaluate(t1, act.u ? au : velocity_at(t1, u), aB);
      if (act.u) {
        weights.advance(u.coeffs(), n0.u.coeffs(), n1.u.coeffs());
        guard(u, u0, t1);
      }
      if (act.B) {
        weights.advance(B.coeffs(), n0.B.coeffs(), n1.B.coeffs());
        guard(B, b0, t1);
      }
    }
    if (act.u) rec_u.push_back(u);
    if (act.B) rec_B.push_back(B);
  }
  StateTrajectories s;
  if (act.u) s.u.emplace(times, std::move(rec_u), cfg.horizon);
  if (act.B) s.B.emplace(times, std::move(rec_B), cfg.horizon);
  return s;
}

ProbeResult contraction_probe(const SolverConfig& cfg, const StateTrajectories& H1, const StateTrajectories& H2) {
  const ExponentReport e = validate(cfg);
  const std::vector<double> times = time_nodes(cfg);
  require_compatible(cfg, H1, times, "contraction_probe");
  require_compatible(cfg, H2, times, "contraction_probe");
  ProbeResult r;
  const double input_gap = difference_and_norm(H1, &H2, e).first;
  if (input_gap == 0.0) {
    r.degenerate = true;
    return r;
  }
  const StateTrajectories p1 = run_map(cfg, times, totals(cfg, times, &H1));
  const StateTrajectories p2 = run_map(cfg, times, totals(cfg, times, &H2));
  r.difference = difference_and_norm(p1, &p2, e).first;
  r.ratio = r.difference / input_gap;
  r.bound_factor = state_norm(H1, e) + state_norm(H2, e) + config_free_size(cfg, times, e);
  r.C = r.ratio / r.bound_factor;
  return r;
}

ContractionReport contraction_probe_ensemble(const SolverConfig& cfg, int pairs, double amplitude,
                                             std::uint64_t seed) {
  const ExponentReport e = validate(cfg);
  if (pairs < 1) throw DomainError("contraction probe needs at least one pair");
  const std::vector<double> times = time_nodes(cfg);
  const Activity act = evolved(cfg);
  const GridPtr grid = data_grid(cfg);
  const double radius = std::max(2.0, grid->dealias_cutoff() / 3.0);

  auto candidate = [&](std::uint64_t s) {
    StateTrajectories c;
    auto build = [&](std::uint64_t stream) {
      const SpectralField shape = amplitude * random_solenoidal(grid, derive_seed(s, stream), radius);
      std::vector<SpectralField> fields;
      for (double t : times) fields.push_back((t / cfg.horizon) * shape);
      return Trajectory(times, std::move(fields), cfg.horizon);
    };
    if (act.u) c.u = build(0);
    if (act.B) c.B = build(1);
    return c;
  };

  ContractionReport rep;
  rep.free_norm = config_free_size(cfg, times, e);
  for (int i = 0; i < pairs; ++i) {
    const StateTrajectories h1 = candidate(derive_seed(seed, 2 * static_cast<std::uint64_t>(i)));
    const StateTrajectories h2 = candidate(derive_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
    const ProbeResult p = contraction_probe(cfg, h1, h2);
    if (p.degenerate) {
      ++rep.skipped;
      continue;
    }
    rep.residuals.push_back(p.difference);
    rep.iterate_norms.push_back(p.difference / p.ratio);
    rep.ratios.push_back(p.ratio);
    rep.c_values.push_back(p.C);
  }
  rep.iterations = static_cast<int>(rep.residuals.size());
  rep.converged = true;
  summarize_constants(rep);
  return rep;
}

std::vector<RegularityGainRow> regularity_gain(const SolverConfig& base, double s, double amplitude,
                                               std::uint64_t seed, Distribution distribution,
                                               const std::vector<int>& resolutions) {
  std::vector<RegularityGainRow> rows;
  const double critical = 3.5 - 2.0 * base.kind.alpha;
  for (int n : resolutions) {
    const GridPtr grid = Grid::make(n);
    const SpectralField f = power_law_field(grid, s, amplitude, 0.0, seed);
    const SpectralField fw = randomize(f, draw(derive_seed(seed, static_cast<std::uint64_t>(n)), distribution, grid));
    SolverConfig cfg = base;
    cfg.kind.tag = SystemTag::ElectronMHD;
    cfg.f = fw;
    cfg.g.reset();
    cfg.s_f = s;
    const PicardResult sol = picard_solve(cfg);
    RegularityGainRow row;
    row.n = n;
    row.data_norm_s = sobolev_norm(fw, s);
    row.data_norm_critical = sobolev_norm(fw, critical);
    for (const auto& h : sol.correction.B->fields()) {
      row.correction_sup_critical = std::max(row.correction_sup_critical, sobolev_norm(h, critical));
    }
    row.iterations = sol.report.iterations;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace randhall
