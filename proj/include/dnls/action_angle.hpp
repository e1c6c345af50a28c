// Symplectic polar substitution around the tangential pair and the
// epsilon-rescaling that turns the normal form into a perturbed
// parameter-family Hamiltonian.
//
//   q_{n_i} = sqrt(I_i + xi_i) e^{i theta_i},   q_j = z_j  (normal modes),
//
// with sqrt(I + xi) = sqrt(xi) (1 + I/xi)^{1/2} expanded in I/xi.  Whenever
// a monomial carries an even total power of a tangential mode the radial
// factor is an exact polynomial in I; odd powers are truncated at the
// configured Taylor order.  The substitution is canonical for the
// implemented bracket: {to_action_angle(F), to_action_angle(G)} agrees with
// to_action_angle({F, G}) on every action power both sides resolve.
#pragma once

#include <array>
#include <vector>

#include "dnls/series.hpp"

namespace dnls {

// Polar substitution at parameter xi (both components strictly positive).
// taylor_order bounds the I-power of the expansion of odd radial factors.
FTSeries to_action_angle(const FTSeries& F, const std::array<double, 2>& xi,
                         int taylor_order = 3);

// Taylor-domain gate for evaluating a substituted series: the expansion is
// trusted only while |I_i| <= max_ratio * xi_i.
bool action_gate_ok(const std::array<cplx, 2>& I,
                    const std::array<double, 2>& xi, double max_ratio = 0.1);

// Graded rescaling I -> eps^6 I, z -> eps^3 z, H -> eps^{-10} H: every
// non-constant term is scaled by eps^{6(l1+l2) + 3(|alpha|+|beta|) - 10};
// constants ("depending only on xi") are dropped.  Composing
// rescale(to_action_angle(F, eps^4 * xi), eps) yields the rescaled
// Hamiltonian at reference parameter xi, since each power of the physical
// xi then carries eps^4 itself.
FTSeries rescale(const FTSeries& H, double epsilon);

// Conserved-mass bookkeeping.  The physical mass sum |q_j|^2 of a rescaled
// state splits as eps^4 (xi_1 + xi_2) + eps^6 (I_1 + I_2 + sum |z_j|^2),
// giving the reduction constant c with xi_1 + xi_2 = c - eps^2 S.
struct MassReduction {
  double c = 0.0;        // conserved combination (physical mass / eps^4)
  double residual = 0.0; // defect of the identity, rounding-level
};
MassReduction mass_reduction(const std::array<double, 2>& xi,
                             const std::array<double, 2>& I,
                             const std::vector<cplx>& z, double epsilon);

// S = I_1 + I_2 + sum_j z_j zbar_j, the quadratic mass remainder.
FTSeries mass_quadratic(const ModeLattice& lat, const SeriesCaps& caps);

// Correction spawned by eliminating (xi_1 + xi_2) = c - eps^2 S from the
// frequency block: the exact form
//   -(eps^2 / 2pi) S [ (n1 + n2)(I_1 + I_2) + sum_j j z_j zbar_j ]
// and the compact square variant
//   -(eps^2 (n1 + n2) / 2pi) S^2,
// which replaces the mode weight j by n1 + n2 throughout.
FTSeries mass_elimination_exact(const ModeLattice& lat, const SeriesCaps& caps,
                                double epsilon);
FTSeries mass_elimination_square(const ModeLattice& lat,
                                 const SeriesCaps& caps, double epsilon);

}  // namespace dnls
