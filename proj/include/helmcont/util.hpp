#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace helmcont {

using cdouble = std::complex<double>;

/// Configuration or precondition failure. Carries the offending key/argument
/// name so the CLI can report it verbatim.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

/// Numerical failure (step instability, overflow, unsolvable boundary system).
/// Never silent: callers either propagate or record a flagged entry.
class NumericalError : public std::runtime_error {
public:
  NumericalError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

/// Pairwise summation. Order-deterministic and accurate to ~eps*log2(n),
/// so reductions agree bit-for-bit no matter how the work was partitioned.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(std::span<const double>(x));
}

/// Thread cap: HELMCONT_THREADS if set and positive, hardware concurrency
/// otherwise. A value of 1 forces fully serial execution.
inline unsigned max_threads() {
  if (const char* s = std::getenv("HELMCONT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(s, &end, 10);
    if (end != s && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

/// Static block-partitioned parallel loop. Each index is processed exactly
/// once and results must be written to per-index slots; combined with
/// pairwise_sum reductions this keeps every output independent of the
/// thread count. The first exception wins and is rethrown on the caller.
template <typename F>
void parallel_for(std::size_t n, F&& body) {
  const unsigned want = std::min<std::size_t>(max_threads(), n);
  if (want <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(want);
  std::exception_ptr first_error;
  std::mutex err_mutex;
  const std::size_t chunk = (n + want - 1) / want;
  for (unsigned t = 0; t < want; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

/// Deterministic standard-normal stream. mt19937_64 has a pinned sequence and
/// Box-Muller avoids the library-defined std::normal_distribution, so a seed
/// reproduces the same draws on every platform.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  cdouble next_complex() {
    const double re = next();
    const double im = next();
    return {re, im};
  }

private:
  double uniform() {
    // 53-bit mantissa draw in [0,1)
    return (rng_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Cubic Lagrange interpolation through four samples at integer offsets
/// {0,1,2,3} of spacing h, evaluated at offset t (in units of h).
template <typename T>
T cubic_interp4(const T& f0, const T& f1, const T& f2, const T& f3, double t) {
  const double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  const double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  const double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  const double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return f0 * w0 + f1 * w1 + f2 * w2 + f3 * w3;
}

/// Least-squares slope of y against x (with intercept).
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) throw std::invalid_argument("ls_slope needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  if (d == 0.0) throw std::invalid_argument("ls_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / d;
}

/// Least-squares line through the origin: argmin_c sum (y - c x)^2.
inline double ls_through_origin(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  if (sxx == 0.0) throw std::invalid_argument("ls_through_origin: zero abscissae");
  return sxy / sxx;
}

}  // namespace helmcont
