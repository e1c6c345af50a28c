// Small shared utilities: error checking, deterministic RNG, float
// formatting, and the couple of regression fits used by the diagnostics.
#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dnls {

using cplx = std::complex<double>;
inline constexpr cplx iu{0.0, 1.0};  // imaginary unit

// Contract check used for both user-facing argument validation and internal
// invariants; throws so the CLI can map failures to exit code 1 with the
// offending message.
#define DNLS_CHECK(cond, msg)                                        \
  do {                                                               \
    if (!(cond)) throw std::runtime_error(std::string("check failed: ") + (msg)); \
  } while (0)

// ------------------------------------------------------------------ random
// splitmix64-seeded xoshiro256** with an explicit double conversion.  We do
// not use <random> distributions: their algorithms are implementation
// details of the standard library, and golden files require the exact
// stream to be reproducible from the seed alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& w : s_) {
      x += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      w = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t s_[4];
};

// ------------------------------------------------------------- formatting
// Shortest decimal string that round-trips the double (std::to_chars).
inline std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  DNLS_CHECK(ec == std::errc(), "to_chars failure");
  return std::string(buf, p);
}

// ------------------------------------------------------------------- fits
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Least squares y = slope * x through the origin.  R^2 is the uncentered
// coefficient of determination (the natural choice for a no-intercept
// model): 1 - sum((y - s x)^2) / sum(y^2).
inline LineFit fit_through_origin(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  DNLS_CHECK(x.size() == y.size() && !x.empty(), "fit: size mismatch");
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  LineFit f;
  f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.slope * x[i];
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;  // all-zero data fits exactly
  return f;
}

// Ordinary least squares y = slope * x + intercept with centered R^2.
inline LineFit fit_line(const std::vector<double>& x,
                        const std::vector<double>& y) {
  DNLS_CHECK(x.size() == y.size() && x.size() >= 2, "fit: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    ss_res += r * r;
  }
  f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

// 95% normal-approximation half-width for a binomial proportion.
inline double binomial_ci95(double p_hat, std::size_t n) {
  DNLS_CHECK(n > 0, "ci: empty sample");
  return 1.96 * std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) /
                          static_cast<double>(n));
}

}  // namespace dnls
