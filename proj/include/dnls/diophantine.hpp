// Small-divisor exclusion conditions on the parameter xi.  Five families of
// lower bounds are checked for the frequency combinations
//   <k, omega>,  <k, omega> +- Omega_j,  <k, omega> +- Omega_i +- Omega_j,
//   <k, omega> + Omega_i - Omega_j (|i| != |j|),
//   <k, omega> + Omega_j - Omega_{-j},
// each against gamma * weight / |k|^tau with the family's site weight.  All
// combinations are evaluated in split form: the exact integer multiple of
// eps^{-4} is carried separately from the O(1) affine remainder, so margins
// stay exact at desk-scale eps where the two parts differ by twelve orders
// of magnitude.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dnls/frequency.hpp"
#include "dnls/series.hpp"

namespace dnls {

struct DiophantineParams {
  double gamma = 1e-4;  // exclusion strength
  double tau = 5.0;     // Fourier decay exponent
  int K_max = 20;       // angle-index cutoff, |k|_1 <= K_max
  int J_max = 60;       // normal-site cutoff, |i|, |j| <= J_max
  double delta = 1.0;   // site-weight exponent

  // m_floor is the measured nondegeneracy ratio floor; the exclusion
  // strength must leave at least half of it.
  void validate(double m_floor) const;
};

enum class Family : int {
  k = 0,           // <k, omega> alone
  kj = 1,          // one normal site
  kij_same = 2,    // two sites, equal signs
  kij_diff = 3,    // two sites, opposite signs, |i| != |j|
  kj_reflect = 4,  // reflected pair (j, -j)
};
inline constexpr int kFamilyCount = 5;

// Short display tag, e.g. "kj+-" for Family::kj.
const char* family_tag(Family f);

struct Violation {
  Family family = Family::k;
  std::array<int, 2> k{{0, 0}};
  int i = 0, j = 0;    // sites (0 = unused)
  int si = 0, sj = 0;  // signs of Omega_i / Omega_j in the combination
  double margin = 0.0; // |combination| - gamma * weight, negative here
};

// The site-weight multiset of a violated condition, as (mode, sign) pairs
// feeding l_bracket / l_bracket_unsigned.
std::vector<std::pair<int, int>> violation_l(const Violation& v);

struct ResonanceReport {
  std::array<double, 2> xi{{0.0, 0.0}};
  std::vector<Violation> violations;
};

// Exhaustive scan of every condition within the cutoffs at one parameter
// point; empty violations == xi survives the exclusion at these cutoffs.
ResonanceReport diophantine_report(const std::array<double, 2>& xi,
                                   const FrequencyMap& freq,
                                   const DiophantineParams& params);

// A condition whose eps^{-4} integer part vanishes identically, reduced to
// its affine form a0 + a1 xi_1 + a2 xi_2; only these can come close to zero
// at small eps.  weight is the family site weight already divided by
// |k|_1^tau, so the condition reads |a0 + a1 xi1 + a2 xi2| >= gamma * weight.
struct Candidate {
  Family family = Family::k;
  std::array<int, 2> k{{0, 0}};
  int i = 0, j = 0, si = 0, sj = 0;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double weight = 0.0;
};

std::vector<Candidate> enumerate_candidates(const FrequencyMap& freq,
                                            const DiophantineParams& params);

// Minimum of |combination| / weight over every condition with a NONZERO
// integer part, at one parameter point.  When this floor is far above any
// gamma in play, the candidate list is provably the complete violation
// surface and the Monte-Carlo sweep may evaluate candidates only.
double crossover_floor(const std::array<double, 2>& xi,
                       const FrequencyMap& freq,
                       const DiophantineParams& params);

}  // namespace dnls
