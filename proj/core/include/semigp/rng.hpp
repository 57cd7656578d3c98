#ifndef SEMIGP_RNG_HPP
#define SEMIGP_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace semigp {

// Seeded random stream. All randomness in the project flows from one master
// seed; independent streams (one per chain / replicate) are derived by
// counter-based splitting so results do not depend on thread scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(mix(seed)) {}

  // Derive the stream for (master seed, counter). Distinct counters give
  // statistically independent streams.
  static RngStream derive(std::uint64_t master, std::uint64_t counter) {
    std::uint64_t s = mix(master + 0x9e3779b97f4a7c15ULL * (counter + 1));
    return RngStream(mix(s));
  }

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on the open interval (0,1).
  double uniform() {
    double u;
    do {
      u = std::uniform_real_distribution<double>(0.0, 1.0)(gen_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(gen_);
  }

  // Gamma with shape/rate parameterization (mean = shape/rate).
  double gamma_rate(double shape, double rate) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(gen_);
  }

  double beta(double a, double b) {
    double x = std::gamma_distribution<double>(a, 1.0)(gen_);
    double y = std::gamma_distribution<double>(b, 1.0)(gen_);
    return x / (x + y);
  }

  int uniform_int(int n) {  // 0..n-1
    return std::uniform_int_distribution<int>(0, n - 1)(gen_);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Categorical draw from unnormalized log weights (log-sum-exp normalized).
  // Returns -1 if the weights cannot be normalized (all -inf or NaN).
  int categorical_from_log(std::span<const double> logw) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double w : logw) mx = std::max(mx, w);
    if (!std::isfinite(mx)) return -1;
    double total = 0.0;
    for (double w : logw) total += std::exp(w - mx);
    double target = uniform() * total;
    double cum = 0.0;
    for (std::size_t i = 0; i < logw.size(); ++i) {
      cum += std::exp(logw[i] - mx);
      if (target <= cum) return static_cast<int>(i);
    }
    return static_cast<int>(logw.size()) - 1;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
};

}  // namespace semigp

#endif
