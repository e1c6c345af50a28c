// Affine frequency maps of the reduced normal form, kept in split form:
// every frequency is an exact integer multiple of eps^{-4} plus an O(1)
// affine part in xi, so small-divisor combinations whose integer parts
// cancel can be evaluated without catastrophic cancellation at tiny eps.
//
// Three variants are carried:
//   unreduced  - read straight off the diagonal normal form:
//                  omega_1 = eps^{-4} n1^2 + (n1 xi1 + (n1+n2) xi2)/2pi
//                  Omega_j = eps^{-4} j^2 + ((n1+j) xi1 + (n2+j) xi2)/2pi
//   reduced    - after eliminating (xi1 + xi2) by the conserved mass c:
//                  omega_1 = eps^{-4} n1^2 + ((n1+n2) c - n2 xi1)/2pi
//                  Omega_j = eps^{-4} j^2 + (c j + n1 xi1 + n2 xi2)/2pi
//   displayed  - the halved-weight variant used by the nondegeneracy
//                analysis and the exclusion-set geometry:
//                  omega_1 = eps^{-4} n1^2 + ((n1+n2) c + (n1-n2) xi1)/4pi
//                  Omega_j = eps^{-4} j^2 + (c j + n1 xi1 + n2 xi2)/4pi
// reduced and unreduced agree identically on the mass shell c = xi1 + xi2.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dnls/series.hpp"

namespace dnls {

struct SplitVal {
  long long ipart = 0;  // exact coefficient of eps^{-4}
  double frac = 0.0;    // O(1) affine remainder

  double value(double inv_eps4) const {
    return double(ipart) * inv_eps4 + frac;
  }
  SplitVal operator-() const { return {-ipart, -frac}; }
  SplitVal& operator+=(const SplitVal& o) {
    ipart += o.ipart;
    frac += o.frac;
    return *this;
  }
  SplitVal& operator-=(const SplitVal& o) { return *this += -o; }
  friend SplitVal operator+(SplitVal a, const SplitVal& b) { return a += b; }
  friend SplitVal operator-(SplitVal a, const SplitVal& b) { return a -= b; }
  friend SplitVal operator*(long long s, const SplitVal& v) {
    return {s * v.ipart, double(s) * v.frac};
  }
};

enum class FreqVariant { unreduced, reduced, displayed };

struct FrequencyMap {
  ModeLattice lat;
  FreqVariant variant = FreqVariant::displayed;
  double c = 0.0;        // conserved-mass parameter (reduced/displayed)
  double epsilon = 1.0;  // rescaling parameter

  double inv_eps4() const;

  // which is 0 or 1 (tangential slot); j any nonzero integer outside the
  // tangential pair.
  SplitVal omega_split(int which, const std::array<double, 2>& xi) const;
  SplitVal Omega_split(int j, const std::array<double, 2>& xi) const;
  double omega(int which, const std::array<double, 2>& xi) const {
    return omega_split(which, xi).value(inv_eps4());
  }
  double Omega(int j, const std::array<double, 2>& xi) const {
    return Omega_split(j, xi).value(inv_eps4());
  }
};

// Frequencies read off a diagonal normal form: the I-linear and z_j zbar_j
// coefficients of (Lambda + G_bar) after the polar substitution at xi.
// Omega is densely indexed over the lattice (zero at tangential slots).
struct FrequencyTable {
  std::array<double, 2> omega{};
  std::vector<double> Omega;
};
FrequencyTable frequencies_from_series(const FTSeries& lambda,
                                       const FTSeries& g_bar,
                                       const std::array<double, 2>& xi);

// Size data of a finitely-supported integer weight l (list of (mode,
// weight) pairs, repeated modes allowed, all nonzero):
//   abs      |l|      = sum |l_j|
//   weighted |l|_d    = sum |j|^delta |l_j|
//   angle    <l>_d    = max(1, |sum j l_j| * |l|_d)
struct LBracket {
  double angle = 1.0;
  double weighted = 0.0;
  int abs = 0;
};
LBracket l_bracket(const std::vector<std::pair<int, int>>& l, double delta);

// Variant with the first factor sum |j| |l_j| instead of |sum j l_j|: the
// two agree whenever the support of l lies on one side of zero.  The
// unsigned form is the one the small-divisor geometry runs on — for
// opposite-sign differences e_i - e_{-j} the signed moment grows like
// |i| + |j| while the frequency combination only separates like
// ||i| - |j||, so the signed ratio floor would decay like 1/J_max instead
// of staying uniformly positive.
LBracket l_bracket_unsigned(const std::vector<std::pair<int, int>>& l,
                            double delta);

// Twist data of the displayed frequency map: the Jacobian A of xi -> omega,
// its determinant, and the largest constant m with
// |<l, Omega>| >= m * l_bracket_unsigned(l, 1).angle over the patterns
// l = +-e_j, e_i + e_j, e_i - e_j (|i| != |j|) with support <= J_max,
// minimized over `samples` random xi in [xi_floor, 1]^2.
struct Nondegeneracy {
  std::array<std::array<double, 2>, 2> A{};
  double detA = 0.0;
  double m = 0.0;
};
Nondegeneracy nondegeneracy(const ModeLattice& pair, double c, double epsilon,
                            int J_max, int samples = 1000,
                            std::uint64_t seed = 9001,
                            double xi_floor = 1e-3);

}  // namespace dnls
