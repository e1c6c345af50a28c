#include "dnls/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dnls/util.hpp"

namespace dnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Windowed amplitude A(w) = sum_k w_k s_k e^{i w (t_k - t_mid)} and its
// first two derivatives in w (times are centered for conditioning).
struct Periodogram {
  const std::vector<double>& t;
  const std::vector<cplx>& s;
  const std::vector<double>& w;
  double t_mid;

  void eval(double omega, cplx* A, cplx* dA, cplx* ddA) const {
    cplx a = 0.0, da = 0.0, dda = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const double tc = t[k] - t_mid;
      const cplx e = w[k] * s[k] * std::polar(1.0, omega * tc);
      a += e;
      da += cplx(0.0, tc) * e;
      dda += -tc * tc * e;
    }
    *A = a;
    if (dA) *dA = da;
    if (ddA) *ddA = dda;
  }
};

}  // namespace

ModeFrequency dominant_tone(const std::vector<double>& t,
                            const std::vector<cplx>& s, bool refine) {
  DNLS_CHECK(t.size() == s.size() && t.size() >= 16,
             "tone extraction: need at least 16 uniform samples");
  const std::size_t M = t.size();
  const double dt = t[1] - t[0];
  DNLS_CHECK(dt > 0.0, "tone extraction: samples must advance in time");
  for (std::size_t k = 1; k < M; ++k)
    DNLS_CHECK(std::abs(t[k] - t[0] - double(k) * dt) <= 1e-6 * dt * M,
               "tone extraction: sampling must be uniform");

  ModeFrequency out;
  double energy = 0.0;
  for (const cplx& c : s) energy += std::norm(c);
  if (energy == 0.0) return out;  // flagged non-dominant, zero frequency

  // Hann window.
  std::vector<double> w(M);
  double wsum = 0.0, wenergy = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    w[k] = 0.5 * (1.0 - std::cos(kTwoPi * double(k) / double(M - 1)));
    wsum += w[k];
    wenergy += w[k] * std::norm(s[k]);
  }

  // Zero-padded transform of the windowed series; the peak bin seeds the
  // frequency estimate.  The transform uses e^{-i 2 pi k b / P}, so a tone
  // e^{-i w t} peaks where the signed bin angle is -w dt.
  std::size_t P = 1;
  while (P < 8 * M) P <<= 1;
  std::vector<cplx> buf(P, cplx(0.0)), spec(P);
  for (std::size_t k = 0; k < M; ++k) buf[k] = w[k] * s[k];
  fftw_plan plan = fftw_plan_dft_1d(
      int(P), reinterpret_cast<fftw_complex*>(buf.data()),
      reinterpret_cast<fftw_complex*>(spec.data()), FFTW_FORWARD,
      FFTW_ESTIMATE);
  DNLS_CHECK(plan != nullptr, "tone extraction: transform planning failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::size_t peak = 0;
  double best = -1.0;
  for (std::size_t b = 0; b < P; ++b) {
    const double mag = std::norm(spec[b]);
    if (mag > best) {
      best = mag;
      peak = b;
    }
  }

  // Three-point quadratic interpolation on log magnitude.
  const auto mag_at = [&](std::size_t b) {
    return std::abs(spec[(b + P) % P]);
  };
  const double alpha = std::log(std::max(mag_at(peak + P - 1), 1e-300));
  const double beta = std::log(std::max(mag_at(peak), 1e-300));
  const double gamma = std::log(std::max(mag_at(peak + 1), 1e-300));
  double delta = 0.0;
  const double curv = alpha - 2.0 * beta + gamma;
  if (curv < 0.0) delta = 0.5 * (alpha - gamma) / curv;
  delta = std::clamp(delta, -0.5, 0.5);

  double theta = kTwoPi * (double(peak) + delta) / double(P);
  if (theta > std::numbers::pi) theta -= kTwoPi;  // signed bin angle
  double omega = -theta / dt;  // rotation frequency of e^{-i w t}

  const double t_mid = 0.5 * (t.front() + t.back());
  const Periodogram pg{t, s, w, t_mid};

  if (refine) {
    // Newton steps on d/dw |A(w)|^2 = 2 Re(conj(A) A').
    const double bin = kTwoPi / (double(M) * dt);
    for (int it = 0; it < 8; ++it) {
      cplx A, dA, ddA;
      pg.eval(omega, &A, &dA, &ddA);
      const double g = 2.0 * (std::conj(A) * dA).real();
      const double h =
          2.0 * (std::norm(dA) + (std::conj(A) * ddA).real());
      if (h >= 0.0) break;  // not locally concave: keep the seed
      const double step = g / h;
      if (std::abs(step) > bin) break;  // runaway: keep the current value
      omega -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(omega))) break;
    }
  }

  cplx A;
  pg.eval(omega, &A, nullptr, nullptr);
  out.omega = omega;
  out.amplitude = std::abs(A) / wsum;
  // Cauchy-Schwarz ratio: 1 exactly for a pure tone at omega.
  out.leakage = 1.0 - std::norm(A) / (wsum * wenergy);
  out.leakage = std::clamp(out.leakage, 0.0, 1.0);
  out.dominant = out.leakage <= 0.5;
  return out;
}

std::vector<ModeFrequency> extract_frequencies(const Trajectory& traj,
                                               const std::vector<int>& modes,
                                               bool refine) {
  std::vector<ModeFrequency> out;
  out.reserve(modes.size());
  for (int n : modes) {
    ModeFrequency f = dominant_tone(traj.t, traj.mode_series(n), refine);
    f.mode = n;
    out.push_back(f);
  }
  return out;
}

double non_excited_fraction(const Trajectory& traj,
                            const std::vector<int>& excited) {
  DNLS_CHECK(!traj.t.empty(), "trajectory is empty");
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    if (traj.mass[k] <= 0.0) continue;
    double kept = 0.0;
    for (int n : excited) kept += std::norm(traj.mode_series(n)[k]);
    kept *= kTwoPi;
    worst = std::max(worst, (traj.mass[k] - kept) / traj.mass[k]);
  }
  return worst;
}

}  // namespace dnls
