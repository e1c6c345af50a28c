#include "dnls/model.hpp"

#include <numbers>

namespace dnls {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double g_kernel(int i, int j, int k, int l) {
  DNLS_CHECK(i != 0 && j != 0 && k != 0 && l != 0,
             "g_kernel: zero mode is outside the zero-mean phase space");
  return (i + j == k + l) ? 1.0 / kTwoPi : 0.0;
}

FTSeries build_lambda(const ModeLattice& lat, const SeriesCaps& caps) {
  FTSeries s(Structure::lattice_qqbar, lat, caps);
  for (int j : lat.all_modes())
    s.add_term(make_qq_key({{j, 1}}, {{j, 1}}), double(j) * double(j));
  return s;
}

FTSeries build_quartic(const ModeLattice& lat, const SeriesCaps& caps) {
  FTSeries s(Structure::lattice_qqbar, lat, caps);
  s.reserve(std::size_t(lat.mode_count()) * lat.mode_count() * 4);
  // Ordered-tuple sum (1/2) sum_{i+j=k+l} j/(2pi) q_i q_j qbar_k qbar_l,
  // accumulated into canonical monomials.  Enumeration order is fixed
  // (i, then j, then k ascending) for bitwise-reproducible coefficients.
  for (int i : lat.all_modes()) {
    for (int j : lat.all_modes()) {
      for (int k : lat.all_modes()) {
        const int l = i + j - k;
        if (!lat.in_range(l)) continue;
        s.add_term(make_qq_key({{i, 1}, {j, 1}}, {{k, 1}, {l, 1}}),
                   0.5 * double(j) / kTwoPi);
      }
    }
  }
  s.prune();
  return s;
}

FTSeries mass_series(const ModeLattice& lat, const SeriesCaps& caps) {
  FTSeries s(Structure::lattice_qqbar, lat, caps);
  for (int j : lat.all_modes()) s.add_term(make_qq_key({{j, 1}}, {{j, 1}}), 1.0);
  return s;
}

LatticeHamiltonian build_hamiltonian(const ModeLattice& lat,
                                     const SeriesCaps& caps) {
  return LatticeHamiltonian{lat, build_lambda(lat, caps),
                            build_quartic(lat, caps)};
}

namespace {

PhasePoint state_point(const ModeLattice& lat, const std::vector<cplx>& q) {
  DNLS_CHECK(int(q.size()) == lat.mode_count(), "state: size mismatch");
  PhasePoint p(lat);
  p.z = q;
  for (int i = 0; i < lat.mode_count(); ++i) p.zbar[i] = std::conj(q[i]);
  return p;
}

}  // namespace

std::vector<cplx> gradient_qbar(const FTSeries& G, const ModeLattice& lat,
                                const std::vector<cplx>& q) {
  return G.eval_gradients(state_point(lat, q)).d_zbar;
}

cplx eval_at_state(const FTSeries& F, const ModeLattice& lat,
                   const std::vector<cplx>& q) {
  return F.eval(state_point(lat, q));
}

}  // namespace dnls
