#pragma once

#include "randhall/dynamics.hpp"
#include "randhall/randomization.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace randhall {

inline constexpr const char* kMagneticRelation = "1/α + 3/(2pα) + 2β = 1";
inline constexpr const char* kVelocityRelation = "1/(2α) + 3/(2qα) + 2γ = 1";

/// Exponents tying the Lebesgue indices (p for B, q for u) to the time weights (beta, gamma),
/// plus the auxiliary weights eta (magnetic) and zeta (velocity) of the free-evolution norms.
struct ExponentReport {
  double alpha = 0.0;
  double p = 0.0;
  double q = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  /// Open window max(0, 1/alpha - 1/2) < eta < 1/2 - 2 beta, further capped at 1/2.
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  bool eta_window_empty = false;
  double eta = 0.25;
  /// Window 1/(2 alpha) + gamma/4 <= zeta < 1 - 7 gamma/4, further capped at 1/2.
  double zeta_lo = 0.0;
  double zeta_hi = 0.0;
  bool zeta_window_empty = false;
  double zeta = 0.25;
};

/// beta = (1 - 1/alpha - 3/(2 p alpha))/2 and gamma = (1 - 1/(2 alpha) - 3/(2 q alpha))/2.
/// Throws InfeasibleParameters naming the relation when beta <= 0 or gamma <= 0, and
/// DomainError when alpha is outside [1, 7/4) or p, q < 2. Empty eta/zeta windows are only
/// flagged; the weight then keeps its nominal value 1/4.
ExponentReport parameter_feasibility(double alpha, double p, double q);

/// Same, but only the relations the system needs: beta for ElectronMHD, gamma for NSE, both for HallMHD.
ExponentReport exponents_for(SystemTag tag, double alpha, double p, double q);

struct SolverConfig {
  SystemKind kind;
  double horizon = 0.01;
  double p = 12.0;
  double q = 6.0;
  /// Number of time steps M; the solver works on M + 1 nodes including t = 0.
  int steps = 32;
  /// Nodes t_j = T (j/M)^grading when graded, equispaced otherwise.
  bool graded = true;
  double grading = 2.0;
  /// etd_integrate splits every panel into this many equal substeps and records only at the nodes.
  int etd_substeps = 1;
  double picard_tol = 1e-10;
  int max_iterations = 60;
  /// HallMHD only: hold the velocity at its free evolution (V = 0), which turns the magnetic
  /// equation into electron MHD on a prescribed background flow.
  bool static_flow = false;
  /// Magnetic data f (ElectronMHD, HallMHD) and velocity data g (NSE, HallMHD).
  std::optional<SpectralField> f;
  std::optional<SpectralField> g;
  /// Declared Sobolev regularity of f and g; checked against the theorems' thresholds when finite.
  double s_f = std::numeric_limits<double>::quiet_NaN();
  double s_g = std::numeric_limits<double>::quiet_NaN();
};

/// max{11/2 - 4 alpha, 5/2 - 2 alpha}: regularity required of magnetic data.
double magnetic_data_threshold(double alpha);
/// max{7/2 - 7 alpha/2, 3/2 - 2 alpha}: regularity required of velocity data.
double velocity_data_threshold(double alpha);

/// Checks kind, exponents, horizon, node count, tolerances and data presence/shape.
/// Throws DomainError, PreconditionError or InfeasibleParameters.
ExponentReport validate(const SolverConfig& cfg);

std::vector<double> time_nodes(const SolverConfig& cfg);

/// Velocity and magnetic trajectories; a member is empty when the system does not evolve it.
/// Used both for full solutions and for the Duhamel corrections (V, H).
struct StateTrajectories {
  std::optional<Trajectory> u;
  std::optional<Trajectory> B;
};

/// e^{-t(-Delta)^alpha} data sampled at `times`.
Trajectory free_evolution(const SpectralField& data, double alpha, const std::vector<double>& times,
                          double horizon);

/// out(t_j) = int_0^{t_j} e^{-(t_j - tau)(-Delta)^alpha} F(tau) dtau, with F interpolated linearly
/// between nodes and the semigroup integrated exactly per mode. times[0] must be 0.
Trajectory duhamel_quadrature(const std::vector<double>& times, double horizon, double alpha,
                              const std::function<SpectralField(std::size_t)>& forcing);

/// One application of the Duhamel map: (V, H) -> (Psi, Phi)(V, H), where the nonlinearity is
/// evaluated on free + candidate. Static flow keeps V = 0.
StateTrajectories duhamel_apply(const SolverConfig& cfg, const StateTrajectories& candidate,
                                const StateTrajectories& free);

/// Max of the three constituent norms: sup_t H^{7/2 - 2 alpha}, L^{(beta, 1/beta)}_t L^p and
/// L^{1/(2 beta)}_t L^p.
double y_norm(const Trajectory& H, const ExponentReport& e);
/// Same pattern with (gamma, q, H^{5/2 - 2 alpha}).
double x_norm(const Trajectory& V, const ExponentReport& e);
/// ||V||_X + ||H||_Y over whichever members are present.
double state_norm(const StateTrajectories& s, const ExponentReport& e);

/// Sum of the norms of the free evolution defining the exceptional sets: for B,
/// L^{1/(2 beta)}_t L^p + L^{(beta, 1/beta)}_t L^p + L^{(eta, 2)}_t H^{11/2 - 2 alpha}; for u,
/// L^{1/(2 gamma)}_t L^q + L^{(gamma, 1/gamma)}_t L^q + L^{(zeta, 4)}_t H^{7/2 - 2 alpha}.
double free_data_size(const StateTrajectories& free, const ExponentReport& e);

struct ContractionReport {
  /// ||Phi(H_n) - H_n|| per iteration (or ||Phi(H_1) - Phi(H_2)|| per probe).
  std::vector<double> residuals;
  /// ||H_n|| per iteration (or ||H_1 - H_2|| per probe).
  std::vector<double> iterate_norms;
  /// Lipschitz ratios r_n / r_{n-1}; NaN where undefined.
  std::vector<double> ratios;
  /// ratio / (||H_n|| + ||H_{n-1}|| + lambda); NaN where undefined.
  std::vector<double> c_values;
  double rho = 0.0;
  double C = 0.0;
  /// Standard deviation of the finite c_values divided by their mean.
  double C_dispersion = 0.0;
  double lambda_bar = 0.0;
  double ball_radius = 0.0;
  /// Size lambda of the free data (see free_data_size).
  double free_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  int skipped = 0;
};

/// Fills C (mean of finite c_values), dispersion, lambda_bar = 1/(3C) and 2 C lambda_bar^2.
void summarize_constants(ContractionReport& r);

/// Columns: iter, residual_Y, ratio, C_fit, lambda_bar, ball_radius (the last two per row from C_fit).
void write_contraction_csv(std::ostream& out, const ContractionReport& r);

struct PicardResult {
  StateTrajectories correction;
  ContractionReport report;
  ExponentReport exponents;
};

/// Iterates from the zero trajectory until ||Phi(H) - H|| <= picard_tol ||H|| and returns that H.
/// Throws ConvergenceFailure with the residual history after max_iterations.
PicardResult picard_solve(const SolverConfig& cfg);

/// Optional source term added to the nonlinearity, as a function of time.
using Forcing = std::function<FieldPair(double)>;

/// Second-order exponential time differencing (Cox-Matthews ETD2RK) on the config's nodes,
/// recording the state at every node. Throws BlowUp when a field's L^2 norm exceeds 10^6 times
/// its initial value.
StateTrajectories etd_integrate(const SolverConfig& cfg, const Forcing& forcing = {});

struct ProbeResult {
  double difference = 0.0;
  double ratio = 0.0;
  double bound_factor = 0.0;
  double C = 0.0;
  bool degenerate = false;
};

/// ||Phi(H1) - Phi(H2)|| / ||H1 - H2|| and the factor ||H1|| + ||H2|| + lambda; identical
/// candidates give ratio 0 and are flagged degenerate.
ProbeResult contraction_probe(const SolverConfig& cfg, const StateTrajectories& H1, const StateTrajectories& H2);

/// `pairs` random candidate pairs of size `amplitude` (smooth in x, linear in t, vanishing at 0);
/// one report row per probe.
ContractionReport contraction_probe_ensemble(const SolverConfig& cfg, int pairs, double amplitude,
                                             std::uint64_t seed);

struct RegularityGainRow {
  int n = 0;
  double data_norm_s = 0.0;
  double data_norm_critical = 0.0;
  double correction_sup_critical = 0.0;
  int iterations = 0;
};

/// Randomized power-law data |a_k| = amplitude (1 + |k|^2)^{-(s + 3/2)/2} at each resolution,
/// solved by Picard iteration on the ElectronMHD branch.
std::vector<RegularityGainRow> regularity_gain(const SolverConfig& base, double s, double amplitude,
                                               std::uint64_t seed, Distribution distribution,
                                               const std::vector<int>& resolutions);

}  // namespace randhall
