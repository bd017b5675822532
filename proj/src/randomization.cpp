#include "randhall/randomization.hpp"

#include "randhall/errors.hpp"

#include <cmath>
#include <numbers>

namespace randhall {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::string to_string(Distribution d) { return d == Distribution::Gaussian ? "gaussian" : "rademacher"; }

Distribution parse_distribution(const std::string& name) {
  if (name == "gaussian") return Distribution::Gaussian;
  if (name == "rademacher") return Distribution::Rademacher;
  throw DomainError("unknown distribution '" + name + "' (expected gaussian or rademacher)");
}

std::uint64_t CounterRng::bits(std::uint64_t counter) const { return mix64(key_ ^ mix64(counter * kGolden + 1)); }

double CounterRng::uniform(std::uint64_t counter) const {
  return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t counter) const {
  const double u1 = uniform(2 * counter);
  const double u2 = uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::split(std::uint64_t stream) const { return CounterRng(mix64(key_ + mix64(~stream))); }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return mix64(mix64(base) ^ mix64(index + kGolden)); }

RandomDraw draw(std::uint64_t seed, Distribution distribution, const GridPtr& grid, bool per_component) {
  RandomDraw d;
  d.seed = seed;
  d.distribution = distribution;
  d.grid = grid;
  d.per_component = per_component;
  d.values.resize(grid->size(), 3);
  const CounterRng rng(seed);
  for (Eigen::Index i = 0; i < grid->size(); ++i) {
    // Both members of a pair {k, -k} read the counter of the smaller storage index.
    const Eigen::Index mir = grid->mirror(i);
    if (mir < i) continue;
    const auto canonical = static_cast<std::uint64_t>(i);
    if (per_component) {
      for (int c = 0; c < 3; ++c) d.values(i, c) = rng.sample(distribution, 3 * canonical + c);
    } else {
      d.values.row(i).setConstant(rng.sample(distribution, canonical));
    }
    d.values.row(mir) = d.values.row(i);
  }
  return d;
}

RandomDraw identity_draw(const GridPtr& grid) {
  RandomDraw d;
  d.grid = grid;
  d.distribution = Distribution::Rademacher;
  d.values = Eigen::Array<double, Eigen::Dynamic, 3>::Ones(grid->size(), 3);
  return d;
}

SpectralField randomize(const SpectralField& field, const RandomDraw& d) {
  require_same_grid(field.grid(), *d.grid, "randomize");
  SpectralField out(field.grid_ptr());
  for (int c = 0; c < 3; ++c) out.coeffs().col(c) = field.coeffs().col(c) * d.values.col(c);
  return out;
}

std::vector<MomentReport> moment_check(std::span<const double> c, std::span<const double> orders,
                                       std::size_t n_samples, std::uint64_t seed, Distribution distribution) {
  if (c.empty()) throw DomainError("moment_check: empty coefficient sequence");
  if (n_samples == 0) throw DomainError("moment_check: no samples");
  for (double q : orders) {
    if (!(q >= 2.0)) throw DomainError("moment_check: order q must be >= 2");
  }
  double c_norm2 = 0.0;
  for (double ci : c) c_norm2 += ci * ci;
  const double c_norm = std::sqrt(c_norm2);

  std::vector<double> magnitude(n_samples);
  double peak = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const CounterRng rng(derive_seed(seed, s));
    double x = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) x += c[i] * rng.sample(distribution, i);
    magnitude[s] = std::abs(x);
    peak = std::max(peak, magnitude[s]);
  }

  std::vector<MomentReport> out;
  out.reserve(orders.size());
  for (double q : orders) {
    MomentReport r;
    r.q = q;
    if (peak > 0.0) {
      double acc = 0.0;
      for (double m : magnitude) acc += std::pow(m / peak, q);
      r.empirical_norm = peak * std::pow(acc / static_cast<double>(n_samples), 1.0 / q);
    }
    r.bound_ratio = c_norm > 0.0 ? r.empirical_norm / (std::sqrt(q) * c_norm) : 0.0;
    out.push_back(r);
  }
  return out;
}

MomentReport moment_check(std::span<const double> c, double q, std::size_t n_samples, std::uint64_t seed,
                          Distribution distribution) {
  const double orders[] = {q};
  return moment_check(c, orders, n_samples, seed, distribution).front();
}

}  // namespace randhall
