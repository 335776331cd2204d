#pragma once

// Shared numeric aliases and small deterministic utilities used across the
// library: Eigen-based complex vector/matrix types, a seeded RNG wrapper with
// explicit distributions (so results never depend on libstdc++ internals),
// and a deterministic chunked parallel_for.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace exposelab {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Deterministic RNG. mt19937_64 with explicit bit-to-double conversion;
// identical streams on every platform for a given seed.
// ---------------------------------------------------------------------------
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // Uniform in [0, 1).
  double u01() { return static_cast<double>(state_() >> 11) * 0x1.0p-53; }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * u01(); }

  // Standard normal via Box-Muller (uses two draws; no cached state).
  double normal() {
    double u1 = 0.0;
    while (u1 == 0.0) u1 = u01();
    const double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

  cplx complex_normal() { return cplx(normal(), normal()); }

  // Uniform point on the unit sphere of C^n (real dimension 2n).
  CVec unit_vector(int n) {
    CVec v(n);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < n; ++i) v(i) = complex_normal();
      norm2 = v.squaredNorm();
    } while (norm2 < 1e-300);
    return v / std::sqrt(norm2);
  }

  std::uint64_t raw() { return state_(); }

 private:
  std::mt19937_64 state_;
};

// ---------------------------------------------------------------------------
// Deterministic parallel_for: the index range is split into fixed chunks and
// results are produced by the worker body writing to disjoint slots, so the
// outcome is identical regardless of thread count. Thread count comes from
// EXPOSE_LAB_THREADS (default: hardware concurrency, at least 1).
// ---------------------------------------------------------------------------
inline int thread_budget() {
  if (const char* env = std::getenv("EXPOSE_LAB_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline void parallel_for(std::int64_t begin, std::int64_t end,
                         const std::function<void(std::int64_t)>& body) {
  const std::int64_t count = end - begin;
  if (count <= 0) return;
  const int threads = std::min<std::int64_t>(thread_budget(), count);
  if (threads <= 1) {
    for (std::int64_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::int64_t chunk = (count + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const std::int64_t lo = begin + t * chunk;
    const std::int64_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Small helpers.
// ---------------------------------------------------------------------------
inline bool nearly_equal(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

[[noreturn]] inline void fail(const std::string& msg) {
  throw std::runtime_error(msg);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) fail(msg);
}

}  // namespace exposelab
