#pragma once

#include "randhall/trajectory.hpp"

#include <string>
#include <utility>
#include <vector>

namespace randhall {

enum class SystemTag { NSE, ElectronMHD, HallMHD };

std::string to_string(SystemTag tag);
SystemTag parse_system_tag(const std::string& name);

struct SystemKind {
  SystemTag tag = SystemTag::ElectronMHD;
  double alpha = 1.25;
};

/// Throws DomainError unless alpha lies in [1, 7/4).
void validate(const SystemKind& kind);

/// Velocity and magnetic field evaluated together; unused members stay zero.
struct FieldPair {
  SpectralField u;
  SpectralField B;
};

/// Pseudo-spectral (u.grad)v, dealiased.
SpectralField advection(const SpectralField& u, const SpectralField& v);

/// Pseudo-spectral div(a (x) b) with components sum_j d_j(a_j b_i), dealiased.
/// Equals (a.grad)b when a is divergence-free.
SpectralField divergence_of_outer(const SpectralField& a, const SpectralField& b);

/// curl((curl B) x B). Throws PreconditionError if B is not divergence-free.
SpectralField hall_term(const SpectralField& B);
/// curl(div(B (x) B)); equal to hall_term for divergence-free B.
SpectralField hall_term_tensor_form(const SpectralField& B);

/// Nonlinear parts of the evolution written with tensor products, as they enter the Duhamel maps:
///   N_u = -P div(u (x) u) + P div(B (x) B),
///   N_B = -div(u (x) B) + div(B (x) u) - curl div(B (x) B).
/// NSE only fills N_u, ElectronMHD only N_B. No precondition checks.
FieldPair nonlinear_terms(SystemTag tag, const SpectralField& u, const SpectralField& B);

/// Full right-hand side including dissipation -(-Delta)^alpha, with the velocity equation
/// Leray-projected. NSE ignores B and ElectronMHD ignores u (the ignored output is zero).
FieldPair rhs(const SystemKind& kind, const SpectralField& u, const SpectralField& B);

struct EnergyBalanceReport {
  std::vector<double> midpoints;
  /// (E_{j+1} - E_j) / dt_j with E = (|u|^2 + |B|^2) / 2.
  std::vector<double> energy_rate;
  /// Trapezoid average of |(-Delta)^{alpha/2} u|^2 + |(-Delta)^{alpha/2} B|^2 over the interval.
  std::vector<double> dissipation;
  /// energy_rate + dissipation.
  std::vector<double> residual;
  double max_abs_residual = 0.0;
};

/// Interval-wise energy balance. Both trajectories must share nodes.
EnergyBalanceReport energy_balance(const Trajectory& u, const Trajectory& B, double alpha);

/// |(-Delta)^{alpha/2} f|^2.
double dissipation_rate(const SpectralField& f, double alpha);

/// Relative PDE residual |d_t f_l - F(f_l)| / max(|d_t f_l|, |F(f_l)|) (L^2 norms) of the rescaled
/// solution f_l(x, t) = l^a f(l x, l^{2 alpha} t), with a = 2 alpha - 1 for NSE and 2 alpha - 2 for
/// ElectronMHD, at time t. The original trajectory must contain the node l^{2 alpha} t; the time
/// derivative there comes from five-point Lagrange differentiation on neighbouring nodes.
/// HallMHD has no scaling symmetry and raises DomainError, as does l < 1.
double scaling_residual(const SystemKind& kind, const Trajectory& traj, int lambda, double t);

}  // namespace randhall
