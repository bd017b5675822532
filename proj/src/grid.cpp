#include "randhall/grid.hpp"

#include "randhall/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace randhall {

namespace {

// The FFTW planner is not reentrant; plan execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex>& half_buffer(std::size_t n) {
  thread_local std::vector<Complex> buffer;
  if (buffer.size() < n) buffer.resize(n);
  return buffer;
}

}  // namespace

struct Grid::Plans {
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;
};

GridPtr Grid::make(int n) {
  if (n < 4 || n % 2 != 0) {
    throw DomainError("grid size must be even and at least 4, got " + std::to_string(n));
  }
  static std::mutex cache_mutex;
  static std::map<int, std::weak_ptr<const Grid>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (auto it = cache.find(n); it != cache.end()) {
    if (auto existing = it->second.lock()) return existing;
  }
  GridPtr grid(new Grid(n));
  cache[n] = grid;
  return grid;
}

Grid::Grid(int n) : n_(n), size_(static_cast<Eigen::Index>(n) * n * n) {
  for (auto& kd : k_) kd.resize(size_);
  k2_.resize(size_);
  k2_int_.resize(size_);
  nyquist_mask_.resize(size_);
  dealias_mask_.resize(size_);
  mirror_.resize(size_);

  const int cutoff = (n - 1) / 3;
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      for (int i2 = 0; i2 < n; ++i2) {
        const Eigen::Index idx = (static_cast<Eigen::Index>(i0) * n + i1) * n + i2;
        const std::array<int, 3> kv{wavenumber(i0), wavenumber(i1), wavenumber(i2)};
        int k2 = 0;
        bool nyquist = false;
        bool kept = true;
        for (int d = 0; d < 3; ++d) {
          k_[d](idx) = kv[d];
          k2 += kv[d] * kv[d];
          nyquist = nyquist || kv[d] == -n / 2;
          kept = kept && std::abs(kv[d]) <= cutoff;
        }
        k2_(idx) = k2;
        k2_int_(idx) = k2;
        max_k2_ = std::max(max_k2_, k2);
        nyquist_mask_(idx) = nyquist ? 0.0 : 1.0;
        dealias_mask_(idx) = kept ? 1.0 : 0.0;
        mirror_(idx) = (static_cast<Eigen::Index>((n - i0) % n) * n + (n - i1) % n) * n + (n - i2) % n;
      }
    }
  }

  plans_ = std::make_unique<Plans>();
  const std::size_t half = static_cast<std::size_t>(n) * n * (n / 2 + 1);
  std::vector<double> real(static_cast<std::size_t>(size_));
  std::vector<Complex> spec(half);
  auto* spec_ptr = reinterpret_cast<fftw_complex*>(spec.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->c2r = fftw_plan_dft_c2r_3d(n, n, n, spec_ptr, real.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans_->r2c = fftw_plan_dft_r2c_3d(n, n, n, real.data(), spec_ptr, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Grid::~Grid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->c2r);
  fftw_destroy_plan(plans_->r2c);
}

std::array<int, 3> Grid::wavevector(Eigen::Index idx) const {
  return {static_cast<int>(k_[0](idx)), static_cast<int>(k_[1](idx)), static_cast<int>(k_[2](idx))};
}

void Grid::synthesize(const Complex* coeffs, double* values) const {
  const int nh = n_ / 2 + 1;
  const std::size_t half = static_cast<std::size_t>(n_) * n_ * nh;
  auto& buf = half_buffer(half);
  for (Eigen::Index row = 0; row < static_cast<Eigen::Index>(n_) * n_; ++row) {
    const Complex* src = coeffs + row * n_;
    Complex* dst = buf.data() + row * nh;
    for (int i2 = 0; i2 < nh; ++i2) dst[i2] = src[i2];
  }
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(buf.data()), values);
}

void Grid::analyze(const double* values, Complex* coeffs) const {
  const int n = n_;
  const int nh = n / 2 + 1;
  const std::size_t half = static_cast<std::size_t>(n) * n * nh;
  auto& buf = half_buffer(half);
  fftw_execute_dft_r2c(plans_->r2c, const_cast<double*>(values), reinterpret_cast<fftw_complex*>(buf.data()));

  const double scale = 1.0 / static_cast<double>(size_);
  for (int i0 = 0; i0 < n; ++i0) {
    const int m0 = (n - i0) % n;
    for (int i1 = 0; i1 < n; ++i1) {
      const int m1 = (n - i1) % n;
      Complex* dst = coeffs + (static_cast<Eigen::Index>(i0) * n + i1) * n;
      const Complex* src = buf.data() + (static_cast<std::size_t>(i0) * n + i1) * nh;
      const Complex* msrc = buf.data() + (static_cast<std::size_t>(m0) * n + m1) * nh;
      for (int i2 = 0; i2 < nh; ++i2) dst[i2] = src[i2] * scale;
      for (int i2 = nh; i2 < n; ++i2) dst[i2] = std::conj(msrc[n - i2]) * scale;
    }
  }

  // The i2 = 0 plane is not Hermitian to the last bit straight out of r2c.
  for (int i0 = 0; i0 < n; ++i0) {
    for (int i1 = 0; i1 < n; ++i1) {
      const Eigen::Index a = (static_cast<Eigen::Index>(i0) * n + i1) * n;
      const Eigen::Index b = mirror_(a);
      if (b < a) continue;
      const Complex avg = 0.5 * (coeffs[a] + std::conj(coeffs[b]));
      coeffs[a] = avg;
      coeffs[b] = std::conj(avg);
    }
  }

  for (Eigen::Index idx = 0; idx < size_; ++idx) {
    if (nyquist_mask_(idx) == 0.0) coeffs[idx] = 0.0;
  }
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (a.n() != b.n()) {
    throw StructuralError(std::string(where) + ": grid mismatch (N=" + std::to_string(a.n()) +
                          " vs N=" + std::to_string(b.n()) + ")");
  }
}

}  // namespace randhall
