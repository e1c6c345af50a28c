// Frequency extraction from sampled complex mode series: Hann-windowed
// periodogram peak, quadratic bin interpolation, and optional Newton
// refinement on the continuous periodogram.
//
// Convention: a series s(t) ~ a e^{-i w t} reports frequency w (the sign
// matches the plane-wave rotation of the integrator).
#pragma once

#include <complex>
#include <vector>

#include "dnls/series.hpp"
#include "dnls/sim.hpp"

namespace dnls {

struct ModeFrequency {
  int mode = 0;
  double omega = 0.0;      // rotation frequency of the dominant tone
  double amplitude = 0.0;  // its complex amplitude magnitude
  double leakage = 1.0;    // 1 - (windowed energy captured by the tone)
  bool dominant = false;   // leakage <= 0.5 and nonzero signal
};

// Dominant tone of one uniformly sampled complex series.
ModeFrequency dominant_tone(const std::vector<double>& t,
                            const std::vector<cplx>& s, bool refine = true);

// Per-mode extraction from a trajectory's watch list.
std::vector<ModeFrequency> extract_frequencies(const Trajectory& traj,
                                               const std::vector<int>& modes,
                                               bool refine = true);

// Largest fraction of the mass integral carried by modes outside
// `excited` over the trajectory samples; requires the excited modes to be
// on the watch list.
double non_excited_fraction(const Trajectory& traj,
                            const std::vector<int>& excited);

}  // namespace dnls
