// The truncated lattice Hamiltonian H = Lambda + G for the derivative
// nonlinear Schroedinger flow i u_t + u_xx + i |u|^2 u_x = 0 on the circle
// with zero mean, in Fourier variables q_j (phi_j = e^{ijx}/sqrt(2pi)):
//   Lambda = sum_j j^2 q_j qbar_j
//   G      = (1/2) sum_{i+j=k+l} j (1/2pi) q_i q_j qbar_k qbar_l
// The quartic kernel makes the gradient dG/dqbar_m equal the m-th Fourier
// coefficient of -i |u|^2 u_x, which is the oracle the tests check against.
#pragma once

#include "dnls/series.hpp"

namespace dnls {

// Quartic kernel value: 1/(2pi) when i + j = k + l, else 0.  Zero modes are
// outside the zero-mean phase space.
double g_kernel(int i, int j, int k, int l);

FTSeries build_lambda(const ModeLattice& lat, const SeriesCaps& caps);
FTSeries build_quartic(const ModeLattice& lat, const SeriesCaps& caps);
// Mass observable sum_j q_j qbar_j (a Poisson commutant of H).
FTSeries mass_series(const ModeLattice& lat, const SeriesCaps& caps);

struct LatticeHamiltonian {
  ModeLattice lattice;
  FTSeries lambda;
  FTSeries quartic;

  FTSeries full() const { return add(lambda, quartic); }
};

LatticeHamiltonian build_hamiltonian(const ModeLattice& lat,
                                     const SeriesCaps& caps);

// Gradient sequence (dG/dqbar_m)_m at the state q (dense lattice vector);
// conjugate coordinates are taken as conj(q).
std::vector<cplx> gradient_qbar(const FTSeries& G, const ModeLattice& lat,
                                const std::vector<cplx>& q);

// Value of a (q, qbar)-polynomial at the state q.
cplx eval_at_state(const FTSeries& F, const ModeLattice& lat,
                   const std::vector<cplx>& q);

}  // namespace dnls
