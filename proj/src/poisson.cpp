// Poisson bracket on sparse Fourier-Taylor series.
//
// Both structures are handled by one pair loop:
//   theta/I part   sum_i (F_I_i G_theta_i - F_theta_i G_I_i)
//                  -> coefficient i (l_a[i] k_b[i] - k_a[i] l_b[i]) on the
//                     merged key with l_i reduced by one
//                  (sign fixed so the polar substitution
//                   q_n = sqrt(I + xi) e^{i theta} is canonical: with it
//                   {q_n, qbar_n} = -i matches the z-part convention, and
//                   the angle rotates as e^{-i omega t} like every mode)
//   z part         -i sum_j (F_z_j G_zbar_j - F_zbar_j G_z_j)
//                  -> coefficient -i alpha_a[j] beta_b[j] (and +i for the
//                     mirrored pairing) on the merged key with one power of
//                     z_j and one of zbar_j removed.
// For lattice_qqbar series k = l = 0, so the theta/I part vanishes term by
// term and only the z part fires.
#include <algorithm>
#include <cmath>

#include "dnls/series.hpp"

namespace dnls {

namespace {

SeriesCaps tighter(const SeriesCaps& a, const SeriesCaps& b) {
  SeriesCaps c;
  c.degree_cap = std::min(a.degree_cap, b.degree_cap);
  c.fourier_cap = std::min(a.fourier_cap, b.fourier_cap);
  c.prune = std::max(a.prune, b.prune);
  return c;
}

// Child-key assembly.  `skip_l` in {-1,0,1} removes one action power from
// slot skip_l; `skip_a` / `skip_b` (0 = none) remove one power of that mode
// from the merged alpha / beta exponents.  The caller has already verified
// the child passes the degree cap, so slot capacity cannot overflow; the
// return value guards the cold path anyway.
bool assemble_child(const TermKey& ta, const TermKey& tb, int skip_l,
                    int skip_a, int skip_b, int k1, int k2, TermKey& child) {
  child = TermKey{};
  child.k[0] = static_cast<std::int8_t>(k1);
  child.k[1] = static_cast<std::int8_t>(k2);
  for (int i = 0; i < 2; ++i) {
    int li = int(ta.l[i]) + int(tb.l[i]) - (skip_l == i ? 1 : 0);
    child.l[i] = static_cast<std::uint8_t>(li);
  }
  auto insert_side = [&](const std::int8_t* modes, const std::uint8_t* pows,
                         int n, bool alpha_side, int& skip) {
    for (int i = 0; i < n; ++i) {
      int p = pows[i];
      if (skip != 0 && modes[i] == skip) {
        --p;
        skip = 0;  // consumed
      }
      if (p == 0) continue;
      bool ok = alpha_side
                    ? exp_insert(child.a_mode, child.a_pow, child.n_alpha,
                                 modes[i], p)
                    : exp_insert(child.b_mode, child.b_pow, child.n_beta,
                                 modes[i], p);
      if (!ok) return false;
    }
    return true;
  };
  // Consume the alpha skip against ta first, then tb (one of them holds it).
  int sa = skip_a, sb = skip_b;
  if (!insert_side(ta.a_mode, ta.a_pow, ta.n_alpha, true, sa)) return false;
  if (!insert_side(tb.a_mode, tb.a_pow, tb.n_alpha, true, sa)) return false;
  DNLS_CHECK(sa == 0, "poisson: alpha skip not consumed");
  if (!insert_side(ta.b_mode, ta.b_pow, ta.n_beta, false, sb)) return false;
  if (!insert_side(tb.b_mode, tb.b_pow, tb.n_beta, false, sb)) return false;
  DNLS_CHECK(sb == 0, "poisson: beta skip not consumed");
  return true;
}

}  // namespace

FTSeries poisson(const FTSeries& a, const FTSeries& b) {
  DNLS_CHECK(a.structure() == b.structure(), "poisson: structure mismatch");
  DNLS_CHECK(a.lattice() == b.lattice(), "poisson: lattice mismatch");
  const SeriesCaps caps = tighter(a.caps(), b.caps());
  FTSeries out(a.structure(), a.lattice(), caps);
  out.reserve(a.size() + b.size());

  for (const auto& [ta, ca] : a.terms()) {
    const int deg_a = ta.degree();
    for (const auto& [tb, cb] : b.terms()) {
      const int child_deg = deg_a + tb.degree() - 2;
      const int k1 = int(ta.k[0]) + int(tb.k[0]);
      const int k2 = int(ta.k[1]) + int(tb.k[1]);

      // Cheap cap pre-checks shared by every contribution of this pair.
      const bool deg_ok = child_deg <= caps.degree_cap;
      const bool k_ok =
          std::max(std::abs(k1), std::abs(k2)) <= caps.fourier_cap;

      const cplx cc = ca * cb;
      auto emit = [&](int skip_l, int skip_a, int skip_b, cplx coeff) {
        if (coeff == cplx(0.0)) return;
        if (!deg_ok) {
          ++out.overflow().dropped_degree;
          out.overflow().max_dropped =
              std::max(out.overflow().max_dropped, std::abs(coeff));
          return;
        }
        if (!k_ok) {
          ++out.overflow().dropped_fourier;
          out.overflow().max_dropped =
              std::max(out.overflow().max_dropped, std::abs(coeff));
          return;
        }
        TermKey child;
        if (!assemble_child(ta, tb, skip_l, skip_a, skip_b, k1, k2, child)) {
          ++out.overflow().dropped_capacity;
          out.overflow().max_dropped =
              std::max(out.overflow().max_dropped, std::abs(coeff));
          return;
        }
        out.add_term(child, coeff);
      };

      // theta/I part.
      for (int i = 0; i < 2; ++i) {
        const int cross =
            int(ta.l[i]) * int(tb.k[i]) - int(ta.k[i]) * int(tb.l[i]);
        if (cross != 0) emit(i, 0, 0, iu * double(cross) * cc);
      }

      // z part, F_z G_zbar pairing: modes common to ta.alpha and tb.beta.
      {
        int ia = 0, ib = 0;
        while (ia < ta.n_alpha && ib < tb.n_beta) {
          if (ta.a_mode[ia] < tb.b_mode[ib]) {
            ++ia;
          } else if (ta.a_mode[ia] > tb.b_mode[ib]) {
            ++ib;
          } else {
            const int j = ta.a_mode[ia];
            emit(-1, j, j,
                 -iu * double(int(ta.a_pow[ia]) * int(tb.b_pow[ib])) * cc);
            ++ia;
            ++ib;
          }
        }
      }
      // z part, -F_zbar G_z pairing: modes common to ta.beta and tb.alpha.
      {
        int ia = 0, ib = 0;
        while (ia < ta.n_beta && ib < tb.n_alpha) {
          if (ta.b_mode[ia] < tb.a_mode[ib]) {
            ++ia;
          } else if (ta.b_mode[ia] > tb.a_mode[ib]) {
            ++ib;
          } else {
            const int j = ta.b_mode[ia];
            emit(-1, j, j,
                 iu * double(int(ta.b_pow[ia]) * int(tb.a_pow[ib])) * cc);
            ++ia;
            ++ib;
          }
        }
      }
    }
  }
  out.prune();
  return out;
}

}  // namespace dnls
