// Monte-Carlo estimation of the excluded parameter measure.  The sweep
// evaluates only the candidate conditions — those whose eps^{-4} integer
// part vanishes identically — which is exact once crossover_floor confirms
// that every other condition clears its bound by orders of magnitude.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "dnls/diophantine.hpp"

namespace dnls {

struct ParamBox {
  std::array<double, 2> lo{{1e-3, 1e-3}};
  std::array<double, 2> hi{{1.0, 1.0}};

  double volume() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]); }
  void validate() const;
};

struct MeasureEstimate {
  double gamma = 0.0;
  double estimate = 0.0;  // excluded fraction times box volume
  double ci = 0.0;        // 95% binomial half-width, same scale
  long long violating_samples = 0;
  int sample_count = 0;
  // Samples with at least one violation in each family, by Family index.
  std::array<long long, kFamilyCount> family_counts{{0, 0, 0, 0, 0}};
};

// Per-sample violation summary: the minimum of |combination| / weight over
// the candidates of each family (infinity when a family has none), so a
// sample violates family f at strength gamma exactly when ratio[f] < gamma.
// Computing these once makes the whole gamma sweep a post-processing pass.
struct SampleRatios {
  std::array<double, 2> xi{{0.0, 0.0}};
  std::array<double, kFamilyCount> ratio;
};

// Stratified jittered samples (near-square grid of cells, one point per
// cell) with the candidate ratios evaluated at each.
std::vector<SampleRatios> sample_candidate_ratios(
    const ParamBox& box, const FrequencyMap& freq,
    const DiophantineParams& params, int sample_count, std::uint64_t seed);

// One excluded-measure estimate at params.gamma.  sample_count must be at
// least 100 for the binomial interval to mean anything.
MeasureEstimate measure_excluded(const ParamBox& box, const FrequencyMap& freq,
                                 const DiophantineParams& params,
                                 int sample_count, std::uint64_t seed);

// Shared-sample sweep over several exclusion strengths (one sampling pass,
// one estimate per gamma).
std::vector<MeasureEstimate> measure_scan(const ParamBox& box,
                                          const FrequencyMap& freq,
                                          const DiophantineParams& params,
                                          const std::vector<double>& gammas,
                                          int sample_count,
                                          std::uint64_t seed);

// Measure of {u in [lo, hi] : |g(u)| <= h} for a function whose N-th
// derivative stays above d in absolute value, estimated on a fine grid
// (cells whose both endpoints satisfy the bound), and checked against the
// sublevel bound c * h^{1/N} with c = 2 * (2 + 3 + ... + N + 1/d).
struct SublevelResult {
  double measure = 0.0;
  double bound = 0.0;
};
SublevelResult sublevel_measure(const std::function<double(double)>& g,
                                double lo, double hi, double h, int N,
                                double d, int grid = 200000);

}  // namespace dnls
