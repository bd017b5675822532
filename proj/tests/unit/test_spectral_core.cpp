#include <doctest.h>

#include "randhall/errors.hpp"
#include "randhall/field_factory.hpp"
#include "randhall/io.hpp"
#include "randhall/norms.hpp"
#include "randhall/operators.hpp"

#include <cmath>
#include <sstream>

using namespace randhall;

namespace {

double rel_l2(const SpectralField& a, const SpectralField& b) {
  return std::sqrt((a.coeffs() - b.coeffs()).abs2().sum() / b.coeffs().abs2().sum());
}

SpectralField gradient_of_random_potential(const GridPtr& g, std::uint64_t seed) {
  // a_k = k phi_k with phi built from the x-component of a random field
  const SpectralField base = random_solenoidal(g, seed, 4.0);
  SpectralField out(g);
  for (int d = 0; d < 3; ++d) out.coeffs().col(d) = g->k(d) * base.coeffs().col(0);
  return out;
}

}  // namespace

TEST_CASE("zero field survives the transform round trip") {
  const auto g = Grid::make(8);
  const SpectralField z(g);
  const PhysicalField v = to_physical(z);
  CHECK(v.abs().maxCoeff() == 0.0);
  CHECK(from_physical(g, v).coeffs().abs().maxCoeff() == 0.0);
}

TEST_CASE("mode pair +-e1 synthesizes 2 cos x1") {
  const auto g = Grid::make(8);
  SpectralField f(g);
  f.set_mode({1, 0, 0}, Vector3c(1.0, 0.0, 0.0));
  const PhysicalField v = to_physical(f);
  double err = 0.0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      for (int l = 0; l < 8; ++l) {
        const Eigen::Index row = (static_cast<Eigen::Index>(i) * 8 + j) * 8 + l;
        err = std::max(err, std::abs(v(row, 0) - 2.0 * std::cos(2.0 * M_PI * i / 8)));
        err = std::max(err, std::abs(v(row, 1)) + std::abs(v(row, 2)));
      }
  CHECK(err < 1e-14);
}

TEST_CASE("random divergence-free field round trip at N = 32") {
  const auto g = Grid::make(32);
  const SpectralField f = random_solenoidal(g, 42, 10.0);
  CHECK(f.is_div_free(1e-13));
  CHECK(f.is_hermitian());
  CHECK(rel_l2(from_physical(g, to_physical(f)), f) <= 1e-13);
}

TEST_CASE("hermitian pairing is kept by set_mode and Nyquist rows stay empty") {
  const auto g = Grid::make(8);
  SpectralField f(g);
  f.set_mode({1, -2, 3}, Vector3c({1.0, 2.0}, {0.5, -1.0}, {0.0, 3.0}));
  CHECK(f.mode({-1, 2, -3}).isApprox(f.mode({1, -2, 3}).conjugate()));
  CHECK(f.is_hermitian());
  CHECK_THROWS_AS(f.set_mode({-4, 0, 0}, Vector3c(1.0, 0.0, 0.0)), DomainError);
}

TEST_CASE("Leray projector") {
  const auto g = Grid::make(16);
  SUBCASE("fixes divergence-free fields") {
    const SpectralField f = random_solenoidal(g, 3, 5.0);
    CHECK(rel_l2(leray_project(f), f) <= 1e-14);
  }
  SUBCASE("annihilates gradients") {
    const SpectralField grad = gradient_of_random_potential(g, 9);
    CHECK(std::sqrt(leray_project(grad).coeffs().abs2().sum()) <= 1e-14 * std::sqrt(grad.coeffs().abs2().sum()));
  }
  SUBCASE("is idempotent on a generic field") {
    const SpectralField f = random_solenoidal(g, 4, 5.0) + gradient_of_random_potential(g, 5);
    const SpectralField p = leray_project(f);
    CHECK(rel_l2(leray_project(p), p) <= 1e-14);
    CHECK(p.is_div_free(1e-13));
  }
}

TEST_CASE("Sobolev norm of a single mode pair") {
  const auto g = Grid::make(8);
  SpectralField f(g);
  f.set_mode({0, 1, 0}, Vector3c(1.0, 0.0, 0.0));
  for (double sigma : {-1.5, 0.0, 0.5, 2.0}) CHECK(sobolev_norm(f, sigma) == doctest::Approx(std::sqrt(2.0 * std::pow(2.0, sigma))).epsilon(1e-15));
  CHECK(sobolev_norm(SpectralField(g), 1.0) == 0.0);
}

TEST_CASE("Parseval: H^0 norm equals the quadrature L2 norm") {
  const auto g = Grid::make(16);
  const SpectralField f = random_solenoidal(g, 8, 4.0);
  CHECK(std::abs(sobolev_norm(f, 0.0) - lp_norm(f, 2.0)) <= 1e-12 * sobolev_norm(f, 0.0));
}

TEST_CASE("Lebesgue norms") {
  const auto g = Grid::make(8);
  SUBCASE("constant field") {
    SpectralField c(g);
    c.set_mode({0, 0, 0}, Vector3c(3.0, -4.0, 0.0));
    for (double p : {1.0, 2.0, 3.5, 12.0, kInfinity}) CHECK(lp_norm(c, p) == doctest::Approx(5.0).epsilon(1e-14));
  }
  SUBCASE("2 cos x1") {
    SpectralField f(g);
    f.set_mode({1, 0, 0}, Vector3c(1.0, 0.0, 0.0));
    CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(lp_norm(f, 4.0) == doctest::Approx(1.5650845800732873).epsilon(1e-14));
    CHECK(lp_norm(f, kInfinity) == doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("triangle inequality on random pairs") {
    int violations = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) {
      const SpectralField a = random_solenoidal(g, 2 * i, 2.0);
      const SpectralField b = (0.1 + i % 7) * random_solenoidal(g, 2 * i + 1, 2.0);
      const double p = 1.0 + static_cast<double>(i % 13);
      if (lp_norm(a + b, p) > lp_norm(a, p) + lp_norm(b, p) + 1e-12) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("weighted space-time norms") {
  const auto g = Grid::make(8);
  SpectralField base(g);
  base.set_mode({1, 0, 0}, Vector3c(1.0, 0.0, 0.0));
  const double T = 0.7;

  SUBCASE("constant in time, no weight") {
    const auto times = uniform_nodes(T, 10);
    const Trajectory traj(times, std::vector<SpectralField>(times.size(), base), T);
    const double s = 3.0;
    const double expected = std::pow(T, 1.0 / s) * lp_norm(base, 6.0);
    CHECK(weighted_spacetime_norm(traj, {0.0, s, LebesgueNorm{6.0}}) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("t^-beta amplitude under weight beta and exponent 1/beta") {
    const double beta = 0.05;
    std::vector<double> times;
    std::vector<SpectralField> fields;
    for (int j = 1; j <= 20; ++j) {
      times.push_back(T * j / 20.0);
      fields.push_back(std::pow(times.back(), -beta) / lp_norm(base, 12.0) * base);
    }
    const Trajectory traj(times, fields, T);
    CHECK(weighted_spacetime_norm(traj, {beta, 1.0 / beta, LebesgueNorm{12.0}}) ==
          doctest::Approx(std::pow(T, beta)).epsilon(1e-12));
  }
  SUBCASE("zero trajectory") {
    const auto times = uniform_nodes(T, 4);
    const Trajectory traj(times, std::vector<SpectralField>(times.size(), SpectralField(g)), T);
    CHECK(weighted_spacetime_norm(traj, {0.3, 2.0, SobolevNorm{1.0}}) == 0.0);
    CHECK(weighted_spacetime_norm(traj, {0.0, kInfinity, LebesgueNorm{4.0}}) == 0.0);
  }
  SUBCASE("invalid specs are rejected") {
    CHECK_THROWS_AS(validate(NormSpec{LebesgueNorm{0.5}}), DomainError);
    CHECK_THROWS_AS(validate(NormSpec{SpaceTimeNorm{-0.1, 2.0, LebesgueNorm{2.0}}}), DomainError);
  }
}

TEST_CASE("two-thirds dealiasing") {
  const auto g = Grid::make(32);
  SUBCASE("band-limited field passes unchanged") {
    const SpectralField f = random_solenoidal(g, 1, 10.0);
    CHECK(f.is_dealiased());
    CHECK((dealias(f).coeffs() - f.coeffs()).abs().maxCoeff() == 0.0);
  }
  SUBCASE("mode at N/2 - 1 is removed") {
    SpectralField f(g);
    f.set_mode({15, 0, 0}, Vector3c(0.0, 1.0, 0.0));
    CHECK(dealias(f).coeffs().abs().maxCoeff() == 0.0);
  }
  SUBCASE("idempotent") {
    SpectralField f(g);
    f.coeffs() = from_physical(g, to_physical(random_solenoidal(g, 2, 10.0)).square()).coeffs();
    const SpectralField once = dealias(f);
    CHECK((dealias(once).coeffs() - once.coeffs()).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("curl and fractional Laplacian on a single mode") {
  const auto g = Grid::make(8);
  SpectralField f(g);
  f.set_mode({0, 0, 2}, Vector3c(1.0, 0.0, 0.0));
  // curl(e1 e^{2i x3}) = 2i e2 e^{2i x3}
  CHECK(std::abs(curl(f).mode({0, 0, 2})(1) - Complex(0.0, 2.0)) < 1e-15);
  CHECK(std::abs(fractional_laplacian(f, 1.25).mode({0, 0, 2})(0) - std::pow(2.0, 2.5)) < 1e-13);
}

TEST_CASE("binary dumps round trip exactly") {
  const auto g = Grid::make(8);
  const SpectralField f = random_solenoidal(g, 77, 3.0);
  std::stringstream s;
  io::write_field(s, f);
  const SpectralField back = io::read_field(s);
  CHECK((back.coeffs() - f.coeffs()).abs().maxCoeff() == 0.0);

  const auto times = uniform_nodes(0.5, 3);
  const Trajectory traj(times, {f, 2.0 * f, 3.0 * f, 4.0 * f}, 0.5);
  std::stringstream t;
  io::write_trajectory(t, traj);
  const Trajectory tb = io::read_trajectory(t);
  CHECK(tb.times() == traj.times());
  CHECK(tb.horizon() == 0.5);
  CHECK((tb.field(3).coeffs() - traj.field(3).coeffs()).abs().maxCoeff() == 0.0);

  std::stringstream bad("SFLX garbage");
  CHECK_THROWS_AS(io::read_field(bad), StructuralError);
}

TEST_CASE("grid mismatch is a structural error") {
  const SpectralField a(Grid::make(8));
  const SpectralField b(Grid::make(16));
  CHECK_THROWS_AS(inner_product(a, b), StructuralError);
}
