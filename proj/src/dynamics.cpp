#include "randhall/dynamics.hpp"

#include "randhall/errors.hpp"
#include "randhall/norms.hpp"
#include "randhall/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace randhall {

namespace {

const Complex kI(0.0, 1.0);

void require_solenoidal(const SpectralField& f, const char* where) {
  if (!f.is_div_free(1e-10)) throw PreconditionError(std::string(where) + ": input is not divergence-free");
  if (!f.is_dealiased()) throw PreconditionError(std::string(where) + ": input is not dealiased");
}

// hat(x_j y_i) for all (j, i) from point values; row j, column i.
using ProductTable = std::array<std::array<Eigen::ArrayXcd, 3>, 3>;

ProductTable product_table(const Grid& g, const PhysicalField& x, const PhysicalField& y, bool symmetric) {
  ProductTable t;
  Eigen::ArrayXd prod(g.size());
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      if (symmetric && i < j) {
        t[j][i] = t[i][j];
        continue;
      }
      prod = x.col(j) * y.col(i);
      t[j][i].resize(g.size());
      g.analyze(prod.data(), t[j][i].data());
    }
  }
  return t;
}

// sum_j i k_j T[j][i] (transpose = false) or sum_j i k_j T[i][j] (transpose = true).
SpectralField contract(const GridPtr& grid, const ProductTable& t, bool transpose) {
  const Grid& g = *grid;
  SpectralField out(grid);
  for (int i = 0; i < 3; ++i) {
    Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(g.size());
    for (int j = 0; j < 3; ++j) acc += g.k(j) * (transpose ? t[i][j] : t[j][i]);
    out.coeffs().col(i) = kI * acc;
  }
  dealias_in_place(out);
  return out;
}

SpectralField zero_like(const SpectralField& f) { return SpectralField(f.grid_ptr()); }

}  // namespace

std::string to_string(SystemTag tag) {
  switch (tag) {
    case SystemTag::NSE: return "nse";
    case SystemTag::ElectronMHD: return "emhd";
    case SystemTag::HallMHD: return "hall_mhd";
  }
  return "unknown";
}

SystemTag parse_system_tag(const std::string& name) {
  if (name == "nse") return SystemTag::NSE;
  if (name == "emhd") return SystemTag::ElectronMHD;
  if (name == "hall_mhd") return SystemTag::HallMHD;
  throw DomainError("unknown system kind '" + name + "' (expected nse, emhd or hall_mhd)");
}

void validate(const SystemKind& kind) {
  if (!(kind.alpha >= 1.0 && kind.alpha < 1.75)) {
    throw DomainError("dissipation order alpha must lie in [1, 7/4), got " + std::to_string(kind.alpha));
  }
}

SpectralField advection(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid(), v.grid(), "advection");
  const Grid& g = u.grid();
  const PhysicalField pu = to_physical(u);
  Eigen::ArrayXcd dv(g.size());
  Eigen::ArrayXd grad(g.size());
  Eigen::ArrayXd acc(g.size());
  SpectralField out(u.grid_ptr());
  for (int i = 0; i < 3; ++i) {
    acc.setZero();
    for (int j = 0; j < 3; ++j) {
      dv = kI * g.k(j) * v.coeffs().col(i);
      g.synthesize(dv.data(), grad.data());
      acc += pu.col(j) * grad;
    }
    g.analyze(acc.data(), out.coeffs().col(i).data());
  }
  dealias_in_place(out);
  return out;
}

SpectralField divergence_of_outer(const SpectralField& a, const SpectralField& b) {
  require_same_grid(a.grid(), b.grid(), "divergence_of_outer");
  const bool same = &a == &b;
  const PhysicalField pa = to_physical(a);
  const PhysicalField pb = same ? pa : to_physical(b);
  return contract(a.grid_ptr(), product_table(a.grid(), pa, pb, same), false);
}

SpectralField hall_term(const SpectralField& B) {
  require_solenoidal(B, "hall_term");
  const Grid& g = B.grid();
  const PhysicalField pj = to_physical(curl(B));
  const PhysicalField pb = to_physical(B);
  PhysicalField cross(g.size(), 3);
  cross.col(0) = pj.col(1) * pb.col(2) - pj.col(2) * pb.col(1);
  cross.col(1) = pj.col(2) * pb.col(0) - pj.col(0) * pb.col(2);
  cross.col(2) = pj.col(0) * pb.col(1) - pj.col(1) * pb.col(0);
  SpectralField jxb = from_physical(B.grid_ptr(), cross);
  dealias_in_place(jxb);
  return curl(jxb);
}

SpectralField hall_term_tensor_form(const SpectralField& B) { return curl(divergence_of_outer(B, B)); }

FieldPair nonlinear_terms(SystemTag tag, const SpectralField& u, const SpectralField& B) {
  const GridPtr& grid = tag == SystemTag::NSE ? u.grid_ptr() : B.grid_ptr();
  const Grid& g = *grid;
  FieldPair out{SpectralField(grid), SpectralField(grid)};
  switch (tag) {
    case SystemTag::NSE: {
      const PhysicalField pu = to_physical(u);
      out.u = leray_project(contract(grid, product_table(g, pu, pu, true), false));
      out.u *= -1.0;
      break;
    }
    case SystemTag::ElectronMHD: {
      const PhysicalField pb = to_physical(B);
      out.B = curl(contract(grid, product_table(g, pb, pb, true), false));
      out.B *= -1.0;
      break;
    }
    case SystemTag::HallMHD: {
      require_same_grid(u.grid(), B.grid(), "nonlinear_terms");
      const PhysicalField pu = to_physical(u);
      const PhysicalField pb = to_physical(B);
      const SpectralField div_uu = contract(grid, product_table(g, pu, pu, true), false);
      const SpectralField div_bb = contract(grid, product_table(g, pb, pb, true), false);
      // hat(u_j B_i): contracting over j gives div(u (x) B), over i gives div(B (x) u).
      const ProductTable ub = product_table(g, pu, pb, false);
      out.u = leray_project(div_bb - div_uu);
      out.B = contract(grid, ub, true) - contract(grid, ub, false) - curl(div_bb);
      break;
    }
  }
  return out;
}

FieldPair rhs(const SystemKind& kind, const SpectralField& u, const SpectralField& B) {
  validate(kind);
  const double a = kind.alpha;
  switch (kind.tag) {
    case SystemTag::NSE: {
      require_solenoidal(u, "rhs");
      SpectralField du = leray_project(advection(u, u));
      du *= -1.0;
      du -= fractional_laplacian(u, a);
      return {du, zero_like(u)};
    }
    case SystemTag::ElectronMHD: {
      require_solenoidal(B, "rhs");
      SpectralField dB = hall_term(B);
      dB *= -1.0;
      dB -= fractional_laplacian(B, a);
      return {zero_like(B), dB};
    }
    case SystemTag::HallMHD: {
      require_same_grid(u.grid(), B.grid(), "rhs");
      require_solenoidal(u, "rhs");
      require_solenoidal(B, "rhs");
      SpectralField du = leray_project(advection(B, B) - advection(u, u));
      du -= fractional_laplacian(u, a);
      SpectralField dB = advection(B, u) - advection(u, B) - hall_term(B);
      dB -= fractional_laplacian(B, a);
      return {du, dB};
    }
  }
  throw DomainError("rhs: unknown system kind");
}

double dissipation_rate(const SpectralField& f, double alpha) {
  const Grid& g = f.grid();
  return (f.coeffs().abs2().rowwise().sum() * g.k_squared().pow(alpha)).sum();
}

EnergyBalanceReport energy_balance(const Trajectory& u, const Trajectory& B, double alpha) {
  require_same_nodes(u, B, "energy_balance");
  const std::size_t n = u.size();
  std::vector<double> energy(n), diss(n);
  for (std::size_t j = 0; j < n; ++j) {
    energy[j] = 0.5 * (u.field(j).coeffs().abs2().sum() + B.field(j).coeffs().abs2().sum());
    diss[j] = dissipation_rate(u.field(j), alpha) + dissipation_rate(B.field(j), alpha);
  }
  EnergyBalanceReport r;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double dt = u.time(j + 1) - u.time(j);
    r.midpoints.push_back(0.5 * (u.time(j) + u.time(j + 1)));
    r.energy_rate.push_back((energy[j + 1] - energy[j]) / dt);
    r.dissipation.push_back(0.5 * (diss[j] + diss[j + 1]));
    r.residual.push_back(r.energy_rate.back() + r.dissipation.back());
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(r.residual.back()));
  }
  return r;
}

double scaling_residual(const SystemKind& kind, const Trajectory& traj, int lambda, double t) {
  validate(kind);
  if (kind.tag == SystemTag::HallMHD) throw DomainError("scaling_residual: Hall MHD has no scaling symmetry");
  if (lambda < 1) throw DomainError("scaling_residual: lambda must be a positive integer");
  if (traj.size() < 5) throw DomainError("scaling_residual: need at least five samples");
  const double alpha = kind.alpha;
  const double tau = std::pow(static_cast<double>(lambda), 2.0 * alpha) * t;

  const auto& times = traj.times();
  const auto nearest = std::min_element(times.begin(), times.end(), [tau](double x, double y) {
    return std::abs(x - tau) < std::abs(y - tau);
  });
  if (std::abs(*nearest - tau) > 1e-9 * std::max(1.0, tau)) {
    throw DomainError("scaling_residual: trajectory has no sample at the rescaled time");
  }
  const auto j = static_cast<std::size_t>(nearest - times.begin());
  const std::size_t start = std::min(j >= 2 ? j - 2 : 0, traj.size() - 5);

  // Derivatives of the Lagrange basis on five nodes, evaluated at tau.
  SpectralField dfdt(traj.grid_ptr());
  for (std::size_t m = start; m < start + 5; ++m) {
    double w = 0.0;
    for (std::size_t l = start; l < start + 5; ++l) {
      if (l == m) continue;
      double term = 1.0 / (times[m] - times[l]);
      for (std::size_t q = start; q < start + 5; ++q) {
        if (q == m || q == l) continue;
        term *= (times[j] - times[q]) / (times[m] - times[q]);
      }
      w += term;
    }
    dfdt.coeffs() += w * traj.field(m).coeffs();
  }

  const double amp_exp = kind.tag == SystemTag::NSE ? 2.0 * alpha - 1.0 : 2.0 * alpha - 2.0;
  const double amp = std::pow(static_cast<double>(lambda), amp_exp);
  const double time_factor = std::pow(static_cast<double>(lambda), 2.0 * alpha);
  const SpectralField f = amp * dilate(traj.field(j), lambda);
  const SpectralField dt = (amp * time_factor) * dilate(dfdt, lambda);
  const SpectralField zero(f.grid_ptr());
  const FieldPair F = kind.tag == SystemTag::NSE ? rhs(kind, f, zero) : rhs(kind, zero, f);
  const SpectralField& rate = kind.tag == SystemTag::NSE ? F.u : F.B;

  const double scale = std::max(sobolev_norm(dt, 0.0), sobolev_norm(rate, 0.0));
  if (scale == 0.0) return 0.0;
  return sobolev_norm(dt - rate, 0.0) / scale;
}

}  // namespace randhall
