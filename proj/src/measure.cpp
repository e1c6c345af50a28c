#include "dnls/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dnls/util.hpp"

namespace dnls {

void ParamBox::validate() const {
  DNLS_CHECK(lo[0] < hi[0] && lo[1] < hi[1],
             "measure: box must have positive extent");
  DNLS_CHECK(lo[0] >= 0.0 && lo[1] >= 0.0,
             "measure: box must lie in the nonnegative quadrant");
}

std::vector<SampleRatios> sample_candidate_ratios(
    const ParamBox& box, const FrequencyMap& freq,
    const DiophantineParams& params, int sample_count, std::uint64_t seed) {
  box.validate();
  DNLS_CHECK(sample_count >= 100,
             "measure: sample_count must be at least 100");

  const std::vector<Candidate> cands = enumerate_candidates(freq, params);

  // Stratified jitter: a near-square grid of cells, one uniform draw each.
  const int nx = std::max(1, static_cast<int>(std::lround(
                                  std::sqrt(double(sample_count)))));
  const int ny = (sample_count + nx - 1) / nx;
  Rng rng(seed);

  std::vector<SampleRatios> out;
  out.reserve(sample_count);
  const double span0 = box.hi[0] - box.lo[0];
  const double span1 = box.hi[1] - box.lo[1];
  for (int s = 0; s < sample_count; ++s) {
    const int sx = s % nx;
    const int sy = s / nx;
    SampleRatios sr;
    sr.xi[0] = box.lo[0] + (sx + rng.uniform(0.0, 1.0)) * span0 / nx;
    sr.xi[1] = box.lo[1] + (sy + rng.uniform(0.0, 1.0)) * span1 / ny;
    sr.ratio.fill(std::numeric_limits<double>::infinity());
    for (const Candidate& c : cands) {
      const double val = std::abs(c.a0 + c.a1 * sr.xi[0] + c.a2 * sr.xi[1]);
      double& slot = sr.ratio[static_cast<int>(c.family)];
      slot = std::min(slot, val / c.weight);
    }
    out.push_back(sr);
  }
  return out;
}

namespace {

MeasureEstimate estimate_from_ratios(const std::vector<SampleRatios>& ratios,
                                     double gamma, double volume) {
  MeasureEstimate est;
  est.gamma = gamma;
  est.sample_count = static_cast<int>(ratios.size());
  for (const SampleRatios& sr : ratios) {
    bool any = false;
    for (int f = 0; f < kFamilyCount; ++f) {
      if (sr.ratio[f] < gamma) {
        ++est.family_counts[f];
        any = true;
      }
    }
    if (any) ++est.violating_samples;
  }
  const double n = double(est.sample_count);
  const double p = double(est.violating_samples) / n;
  est.estimate = p * volume;
  est.ci = 1.96 * std::sqrt(p * (1.0 - p) / n) * volume;
  return est;
}

double nondegeneracy_floor(const FrequencyMap& freq,
                           const DiophantineParams& params) {
  return nondegeneracy(freq.lat, freq.c, freq.epsilon, params.J_max).m;
}

}  // namespace

MeasureEstimate measure_excluded(const ParamBox& box, const FrequencyMap& freq,
                                 const DiophantineParams& params,
                                 int sample_count, std::uint64_t seed) {
  if (params.gamma == 0.0) {
    // Degenerate strength excludes nothing; keep the zero estimate exact.
    MeasureEstimate est;
    est.sample_count = sample_count;
    return est;
  }
  params.validate(nondegeneracy_floor(freq, params));
  const std::vector<SampleRatios> ratios =
      sample_candidate_ratios(box, freq, params, sample_count, seed);
  return estimate_from_ratios(ratios, params.gamma, box.volume());
}

std::vector<MeasureEstimate> measure_scan(const ParamBox& box,
                                          const FrequencyMap& freq,
                                          const DiophantineParams& params,
                                          const std::vector<double>& gammas,
                                          int sample_count,
                                          std::uint64_t seed) {
  DNLS_CHECK(!gammas.empty(), "measure: gamma list must be nonempty");
  double gmax = 0.0;
  for (double g : gammas) {
    DNLS_CHECK(g >= 0.0, "measure: gamma must be nonnegative");
    gmax = std::max(gmax, g);
  }
  if (gmax > 0.0) {
    DiophantineParams maxed = params;
    maxed.gamma = gmax;
    maxed.validate(nondegeneracy_floor(freq, params));
  }
  const std::vector<SampleRatios> ratios =
      sample_candidate_ratios(box, freq, params, sample_count, seed);
  std::vector<MeasureEstimate> out;
  out.reserve(gammas.size());
  for (double g : gammas)
    out.push_back(estimate_from_ratios(ratios, g, box.volume()));
  return out;
}

SublevelResult sublevel_measure(const std::function<double(double)>& g,
                                double lo, double hi, double h, int N,
                                double d, int grid) {
  DNLS_CHECK(hi > lo, "sublevel: interval must have positive length");
  DNLS_CHECK(N >= 1, "sublevel: derivative order must be at least 1");
  DNLS_CHECK(d > 0.0, "sublevel: derivative floor must be positive");
  DNLS_CHECK(h >= 0.0, "sublevel: level must be nonnegative");
  DNLS_CHECK(grid >= 2, "sublevel: grid must have at least two cells");

  // c = 2 * (2 + 3 + ... + N + 1/d); the sum is empty when N = 1.
  double c = 1.0 / d;
  for (int m = 2; m <= N; ++m) c += m;
  c *= 2.0;

  SublevelResult res;
  res.bound = c * std::pow(h, 1.0 / N);

  // Count cells whose both endpoints satisfy |g| <= h; isolated touch
  // points then contribute nothing, which keeps the h = 0 case exact for
  // functions with simple zeros.
  const double cell = (hi - lo) / grid;
  bool prev_ok = std::abs(g(lo)) <= h;
  long long cells = 0;
  for (int t = 1; t <= grid; ++t) {
    const bool ok = std::abs(g(lo + t * cell)) <= h;
    if (ok && prev_ok) ++cells;
    prev_ok = ok;
  }
  res.measure = cells * cell;

  DNLS_CHECK(res.measure <= res.bound + 1e-12,
             "sublevel: measured set exceeds the derivative bound");
  return res;
}

}  // namespace dnls
