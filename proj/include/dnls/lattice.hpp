// Truncated mode lattice for the zero-mean circle: modes j in Z \ {0} with
// |j| <= j_max, together with the distinguished tangential pair (n1, n2).
//
// The admissible pairs have n1 odd and |n2 - n1| = 4.  Those two conditions
// make the set {j : j == n1 (mod 4)} an invariant sublattice of the cubic
// mode coupling (i + j - k stays in the class) that does not contain 0, so
// the excited pair can exchange energy only with modes of the same residue
// class and the zero-mean constraint is automatic along such orbits.
#pragma once

#include <vector>

#include "dnls/util.hpp"

namespace dnls {

struct ModeLattice {
  int n1 = 1;   // first tangential mode (odd)
  int n2 = 5;   // second tangential mode, |n2 - n1| = 4
  int j_max = 16;

  ModeLattice() = default;
  ModeLattice(int n1_, int n2_, int j_max_) : n1(n1_), n2(n2_), j_max(j_max_) {
    validate();
  }

  void validate() const {
    DNLS_CHECK(j_max >= 1, "lattice: j_max must be positive");
    DNLS_CHECK(n1 % 2 != 0, "lattice: n1 must be odd");
    const int gap = n2 - n1;
    DNLS_CHECK(gap == 4 || gap == -4, "lattice: |n2 - n1| must equal 4");
    DNLS_CHECK(n1 != 0 && n2 != 0, "lattice: tangential modes must be nonzero");
    DNLS_CHECK(in_range(n1) && in_range(n2),
               "lattice: tangential modes must lie within |j| <= j_max");
  }

  bool in_range(int j) const { return j != 0 && j >= -j_max && j <= j_max; }
  bool is_tangential(int j) const { return j == n1 || j == n2; }
  bool is_normal(int j) const { return in_range(j) && !is_tangential(j); }

  // Residue-class test for the invariant sublattice generated by the pair.
  bool in_sublattice(int j) const {
    int r = (j - n1) % 4;
    return r == 0;
  }

  // Dense index in [0, 2*j_max) for mode j (skips 0).
  int dense_index(int j) const {
    DNLS_CHECK(in_range(j), "lattice: mode out of range");
    return j < 0 ? j + j_max : j + j_max - 1;
  }
  int mode_count() const { return 2 * j_max; }

  std::vector<int> all_modes() const {
    std::vector<int> v;
    v.reserve(mode_count());
    for (int j = -j_max; j <= j_max; ++j)
      if (j != 0) v.push_back(j);
    return v;
  }

  std::vector<int> normal_modes() const {
    std::vector<int> v;
    v.reserve(mode_count() - 2);
    for (int j : all_modes())
      if (!is_tangential(j)) v.push_back(j);
    return v;
  }

  bool operator==(const ModeLattice&) const = default;
};

}  // namespace dnls
