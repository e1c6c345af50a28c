// Order-4 partial normal form around the tangential pair.
//
// Quartic monomials q_i q_j qbar_k qbar_l (i + j = k + l) split by how many
// of their four indices leave {n1, n2} (m_out) and by diagonality
// ({i,j} = {k,l} as multisets):
//   * diagonal, m_out <= 2  -> resonant part  G_bar  (kept in the new normal
//                              form; actions only)
//   * m_out >= 3            -> high part      G_hat  (small near the torus;
//                              kept, untransformed at this order)
//   * the rest (generator support Delta)      -> removed by one Lie step
//     with generator coefficient F_m = i g_m / (i^2 + j^2 - k^2 - l^2).
// The divisor never vanishes on Delta: with i + j = k + l it factors as
// 2 (j - k)(j - l), and a vanishing factor would force diagonality.
#pragma once

#include "dnls/model.hpp"
#include "dnls/series.hpp"

namespace dnls {

struct QuadrupleClass {
  bool diagonal = false;  // {i,j} == {k,l} as multisets
  int m_out = 0;          // components outside {n1, n2}

  bool in_generator_support() const { return !diagonal && m_out <= 2; }
  bool in_resonant_support() const { return diagonal && m_out <= 2; }
  bool in_high_support() const { return m_out >= 3; }
};

// Classification of a momentum-balanced quadruple; i + j != k + l is a
// domain error.
QuadrupleClass classify(int i, int j, int k, int l, const ModeLattice& pair);

// i^2 + j^2 - k^2 - l^2 for a momentum-balanced quadruple (domain error
// otherwise).  Equals 2 (j - k)(j - l).
long small_divisor(int i, int j, int k, int l);

// Split of a quartic (q, qbar)-series by quadruple class.
struct QuarticSplit {
  FTSeries resonant;   // diagonal, m_out <= 2
  FTSeries high;       // m_out >= 3
  FTSeries removable;  // generator support
};
QuarticSplit split_quartic(const FTSeries& G);

// Per-monomial generator i g_m / divisor on the removable support; a zero
// divisor there is a fatal invariant violation reporting the quadruple.
FTSeries birkhoff_generator(const FTSeries& G);

// exp(ad_F) H truncated at order_cap:  sum_{m <= order_cap} ad_F^m(H) / m!
// with ad_F(H) = {H, F}.  Truncation drops are merged into `ovf`; a term
// sup-norm growing over three consecutive orders sets `tail_warning`.
FTSeries lie_transform(const FTSeries& H, const FTSeries& F, int order_cap,
                       Overflow* ovf = nullptr, bool* tail_warning = nullptr);

struct BirkhoffResult {
  FTSeries lambda;   // unchanged quadratic part
  FTSeries g_bar;    // resonant quartic (actions only)
  FTSeries g_hat;    // high quartic
  FTSeries K;        // remainder, degree >= 6
  FTSeries F;        // generating function of the step
  Overflow overflow;
  bool tail_warning = false;
};

// One Birkhoff step: H = Lambda + G  ->  Lambda + G_bar + G_hat + K.
BirkhoffResult normal_form_4(const LatticeHamiltonian& H, int order_cap = 3);

}  // namespace dnls
