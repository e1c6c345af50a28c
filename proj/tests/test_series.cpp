// Core series algebra: term keys, Poisson bracket (against an independent
// brute-force differentiation oracle), structural predicates, norms,
// convolution, and JSON persistence.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "dnls/serialize.hpp"
#include "dnls/series.hpp"

using namespace dnls;

namespace {

const ModeLattice kLat(1, 5, 8);
const SeriesCaps kCaps{6, 8, 1e-15};

FTSeries mono(Structure st, const TermKey& t, cplx c,
              const ModeLattice& lat = kLat, const SeriesCaps& caps = kCaps) {
  FTSeries s(st, lat, caps);
  s.add_term(t, c);
  return s;
}

double coeff_sup_diff(const FTSeries& a, const FTSeries& b) {
  double m = 0.0;
  for (const auto& [t, c] : a.terms()) m = std::max(m, std::abs(c - b.coeff(t)));
  for (const auto& [t, c] : b.terms()) m = std::max(m, std::abs(c - a.coeff(t)));
  return m;
}

// ------------------------------------------------------------------ oracle
// Independent monomial representation: a sorted list of (kind, idx, exp)
// with kind 0 = angle factor e^{i k theta_idx} (exp = k, signed), kind 1 =
// I_idx, kind 2 = z_j, kind 3 = zbar_j.  The bracket is computed by direct
// symbolic differentiation of monomial pairs, with none of the merged-key
// machinery of the production code.
using OMono = std::vector<std::tuple<int, int, int>>;
using OPoly = std::map<OMono, cplx>;

OMono omono_from_key(const TermKey& t) {
  OMono m;
  for (int i = 0; i < 2; ++i)
    if (t.k[i] != 0) m.emplace_back(0, i, int(t.k[i]));
  for (int i = 0; i < 2; ++i)
    if (t.l[i] != 0) m.emplace_back(1, i, int(t.l[i]));
  for (int i = 0; i < t.n_alpha; ++i)
    m.emplace_back(2, int(t.a_mode[i]), int(t.a_pow[i]));
  for (int i = 0; i < t.n_beta; ++i)
    m.emplace_back(3, int(t.b_mode[i]), int(t.b_pow[i]));
  std::sort(m.begin(), m.end());
  return m;
}

OPoly opoly_from_series(const FTSeries& s) {
  OPoly p;
  for (const auto& [t, c] : s.terms()) p[omono_from_key(t)] += c;
  return p;
}

int oexp(const OMono& m, int kind, int idx) {
  for (const auto& [k, i, e] : m)
    if (k == kind && i == idx) return e;
  return 0;
}

// d/d(var) of a monomial: returns scalar factor and the reduced monomial.
std::pair<cplx, OMono> oderiv(const OMono& m, int kind, int idx) {
  const int e = oexp(m, kind, idx);
  if (kind == 0) {  // d/dtheta e^{ik theta} = ik e^{ik theta}
    return {iu * double(e), m};
  }
  if (e == 0) return {0.0, {}};
  OMono out;
  for (const auto& [k, i, ex] : m) {
    if (k == kind && i == idx) {
      if (ex > 1) out.emplace_back(k, i, ex - 1);
    } else {
      out.emplace_back(k, i, ex);
    }
  }
  return {double(e), out};
}

OMono omul(const OMono& a, const OMono& b) {
  std::map<std::pair<int, int>, int> acc;
  for (const auto& [k, i, e] : a) acc[{k, i}] += e;
  for (const auto& [k, i, e] : b) acc[{k, i}] += e;
  OMono out;
  for (const auto& [ki, e] : acc)
    if (e != 0) out.emplace_back(ki.first, ki.second, e);
  return out;
}

std::set<int> modes_used(const OMono& a, const OMono& b) {
  std::set<int> js;
  for (const auto& [k, i, e] : a)
    if (k >= 2) js.insert(i);
  for (const auto& [k, i, e] : b)
    if (k >= 2) js.insert(i);
  return js;
}

OPoly obracket(const OPoly& A, const OPoly& B, Structure st) {
  OPoly out;
  for (const auto& [ma, ca] : A) {
    for (const auto& [mb, cb] : B) {
      if (st == Structure::mixed_angle_action) {
        for (int i = 0; i < 2; ++i) {
          auto [f1, d1] = oderiv(ma, 1, i);  // F_I_i
          auto [f2, d2] = oderiv(mb, 0, i);  // G_theta_i
          if (f1 != cplx(0.0) && f2 != cplx(0.0))
            out[omul(d1, d2)] += ca * cb * f1 * f2;
          auto [f3, d3] = oderiv(ma, 0, i);  // F_theta_i
          auto [f4, d4] = oderiv(mb, 1, i);  // G_I_i
          if (f3 != cplx(0.0) && f4 != cplx(0.0))
            out[omul(d3, d4)] -= ca * cb * f3 * f4;
        }
      }
      for (int j : modes_used(ma, mb)) {
        auto [f1, d1] = oderiv(ma, 2, j);  // F_z_j
        auto [f2, d2] = oderiv(mb, 3, j);  // G_zbar_j
        if (f1 != cplx(0.0) && f2 != cplx(0.0))
          out[omul(d1, d2)] -= iu * ca * cb * f1 * f2;
        auto [f3, d3] = oderiv(ma, 3, j);  // F_zbar_j
        auto [f4, d4] = oderiv(mb, 2, j);  // G_z_j
        if (f3 != cplx(0.0) && f4 != cplx(0.0))
          out[omul(d3, d4)] += iu * ca * cb * f3 * f4;
      }
    }
  }
  for (auto it = out.begin(); it != out.end();) {
    if (std::abs(it->second) == 0.0)
      it = out.erase(it);
    else
      ++it;
  }
  return out;
}

double opoly_diff(const OPoly& a, const OPoly& b) {
  double m = 0.0;
  for (const auto& [k, c] : a) {
    auto it = b.find(k);
    m = std::max(m, std::abs(c - (it == b.end() ? cplx(0.0) : it->second)));
  }
  for (const auto& [k, c] : b)
    if (!a.count(k)) m = std::max(m, std::abs(c));
  return m;
}

// Copy a series into wider caps so downstream brackets cannot overflow.
FTSeries rewrap(const FTSeries& s, const SeriesCaps& caps) {
  FTSeries out(s.structure(), s.lattice(), caps);
  for (const auto& [t, c] : s.terms()) out.add_term(t, c);
  return out;
}

FTSeries random_qqbar(Rng& rng, const ModeLattice& lat, const SeriesCaps& caps,
                      int n_terms, int z_degree_max) {
  FTSeries out(Structure::lattice_qqbar, lat, caps);
  const auto modes = lat.all_modes();
  while (int(out.size()) < n_terms) {
    TermKey t;
    const int nz = 1 + int(rng.below(z_degree_max));
    bool ok = true;
    for (int i = 0; i < nz && ok; ++i) {
      const int j = modes[rng.below(modes.size())];
      if (rng.below(2) == 0)
        ok = exp_insert(t.a_mode, t.a_pow, t.n_alpha, j, 1);
      else
        ok = exp_insert(t.b_mode, t.b_pow, t.n_beta, j, 1);
    }
    if (!ok) continue;
    out.add_term(t, cplx(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)));
  }
  return out;
}

}  // namespace

// --------------------------------------------------------------------------
TEST_CASE("mode lattice validation and indexing") {
  CHECK_NOTHROW(ModeLattice(1, 5, 8).validate());
  CHECK_NOTHROW(ModeLattice(-1, 3, 8).validate());
  CHECK_NOTHROW(ModeLattice(3, -1, 8).validate());
  CHECK_THROWS_WITH_AS(ModeLattice(2, 6, 8), doctest::Contains("odd"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(ModeLattice(1, 7, 8), doctest::Contains("|n2 - n1|"),
                       std::runtime_error);
  CHECK_THROWS(ModeLattice(1, 5, 3));  // n2 outside range
  CHECK_NOTHROW(ModeLattice(1, -3, 8));  // gap -4 is admissible
  CHECK_NOTHROW(ModeLattice(5, 1, 8));

  const ModeLattice lat(1, 5, 8);
  std::set<int> seen;
  for (int j : lat.all_modes()) {
    const int d = lat.dense_index(j);
    CHECK(d >= 0);
    CHECK(d < lat.mode_count());
    seen.insert(d);
  }
  CHECK(int(seen.size()) == lat.mode_count());
  CHECK(lat.is_tangential(1));
  CHECK(lat.is_tangential(5));
  CHECK(lat.is_normal(-3));
  CHECK(!lat.is_normal(5));
  // Residue-class sublattice: closed under the cubic coupling index map.
  CHECK(lat.in_sublattice(1));
  CHECK(lat.in_sublattice(5));
  CHECK(lat.in_sublattice(-3));
  CHECK(!lat.in_sublattice(2));
}

TEST_CASE("term key arithmetic: degree, gauge, momentum, conjugate") {
  // e^{i theta_1} z_2 zbar_3 on pair (1,5)
  TermKey t = make_mixed_key(1, 0, 0, 0, {{2, 1}}, {{3, 1}});
  CHECK(t.degree() == 2);
  CHECK(t.z_degree() == 2);
  CHECK(t.gauge() == 1);           // 1 + (1 - 1) + ... = 1
  CHECK(t.momentum(1, 5) == 0);    // 1*1 + 2 - 3
  CHECK(t.k_inf() == 1);
  CHECK(t.k_l1() == 1);

  TermKey c = t.conjugate();
  CHECK(c.k[0] == -1);
  CHECK(c.alpha(3) == 1);
  CHECK(c.beta(2) == 1);
  CHECK(c.conjugate() == t);

  TermKey d = make_mixed_key(0, 0, 2, 1, {}, {});
  CHECK(d.degree() == 6);  // 2*(2+1)
  CHECK(d.diagonal_in_z());

  TermKey e1 = make_qq_key({{4, 2}, {-3, 1}}, {{4, 2}, {-3, 1}});
  CHECK(e1.diagonal_in_z());
  CHECK(e1.degree() == 6);
  TermKey e2 = make_qq_key({{4, 2}, {-3, 1}}, {{4, 3}});
  CHECK(!e2.diagonal_in_z());
  CHECK(e2.gauge() == 0);
  CHECK(e2.momentum(1, 5) == 5 - 12);
}

TEST_CASE("term ordering is a strict total order, canonical for goldens") {
  Rng rng(7);
  const SeriesCaps caps{6, 8, 1e-15};
  FTSeries s = random_series(rng, kLat, caps, 120, 4, 3);
  auto v = s.sorted_terms();
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    CHECK(v[i].first < v[i + 1].first);
    CHECK(!(v[i + 1].first < v[i].first));
    CHECK(!(v[i].first == v[i + 1].first));
  }
}

TEST_CASE("bracket: single-term pinned values") {
  // {e^{i theta_1}, I_1} = -i e^{i theta_1}: the angle monomial rotates
  // with the same sense as a z mode under a quadratic Hamiltonian.
  FTSeries f = mono(Structure::mixed_angle_action,
                    make_mixed_key(1, 0, 0, 0, {}, {}), 1.0);
  FTSeries g = mono(Structure::mixed_angle_action,
                    make_mixed_key(0, 0, 1, 0, {}, {}), 1.0);
  FTSeries fg = poisson(f, g);
  REQUIRE(fg.size() == 1);
  CHECK(std::abs(fg.coeff(make_mixed_key(1, 0, 0, 0, {}, {})) + iu) == 0.0);

  // Antisymmetric partner: {I_1, e^{i theta_1}} = i e^{i theta_1}
  FTSeries gf = poisson(g, f);
  CHECK(std::abs(gf.coeff(make_mixed_key(1, 0, 0, 0, {}, {})) - iu) == 0.0);

  // {z_3, zbar_3} = -i (constant series)
  FTSeries z = mono(Structure::mixed_angle_action,
                    make_mixed_key(0, 0, 0, 0, {{3, 1}}, {}), 1.0);
  FTSeries zb = mono(Structure::mixed_angle_action,
                     make_mixed_key(0, 0, 0, 0, {}, {{3, 1}}), 1.0);
  FTSeries zz = poisson(z, zb);
  REQUIRE(zz.size() == 1);
  CHECK(std::abs(zz.coeff(TermKey{}) + iu) == 0.0);

  // Same pairing in the plain lattice structure: {q_3, qbar_3} = -i.
  FTSeries q = mono(Structure::lattice_qqbar,
                    make_qq_key({{3, 1}}, {}), 1.0);
  FTSeries qb = mono(Structure::lattice_qqbar,
                     make_qq_key({}, {{3, 1}}), 1.0);
  FTSeries qq = poisson(q, qb);
  REQUIRE(qq.size() == 1);
  CHECK(std::abs(qq.coeff(TermKey{}) + iu) == 0.0);

  // Disjoint variables commute.
  FTSeries z5 = mono(Structure::mixed_angle_action,
                     make_mixed_key(0, 0, 0, 0, {{-3, 1}}, {}), 1.0);
  CHECK(poisson(z, z5).empty());
}

TEST_CASE("bracket matches brute-force differentiation oracle") {
  Rng rng(12345);
  // Operands of total degree <= 4, bracketed inside caps wide enough that
  // no child term is truncated, so the comparison is exact.
  const SeriesCaps gen{4, 2, 0.0};
  const SeriesCaps wide{6, 8, 0.0};
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    FTSeries F = rewrap(random_series(rng, kLat, gen, 25, 4, 2), wide);
    FTSeries G = rewrap(random_series(rng, kLat, gen, 25, 4, 2), wide);
    FTSeries got = poisson(F, G);
    REQUIRE(got.overflow().total() == 0);
    OPoly want = obracket(opoly_from_series(F), opoly_from_series(G),
                          Structure::mixed_angle_action);
    worst = std::max(worst, opoly_diff(opoly_from_series(got), want));
  }
  for (int rep = 0; rep < 10; ++rep) {
    FTSeries F = rewrap(random_qqbar(rng, kLat, gen, 25, 4), wide);
    FTSeries G = rewrap(random_qqbar(rng, kLat, gen, 25, 4), wide);
    FTSeries got = poisson(F, G);
    REQUIRE(got.overflow().total() == 0);
    OPoly want = obracket(opoly_from_series(F), opoly_from_series(G),
                          Structure::lattice_qqbar);
    worst = std::max(worst, opoly_diff(opoly_from_series(got), want));
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("bracket antisymmetry and bilinearity") {
  Rng rng(99);
  const SeriesCaps caps{6, 8, 0.0};
  for (int rep = 0; rep < 10; ++rep) {
    FTSeries F = random_series(rng, kLat, caps, 20, 4, 2);
    FTSeries G = random_series(rng, kLat, caps, 20, 4, 2);
    FTSeries H = random_series(rng, kLat, caps, 20, 4, 2);

    FTSeries anti = poisson(F, G);
    anti.add_scaled(poisson(G, F), 1.0);
    CHECK(anti.coeff_sup() <= 1e-14);

    const cplx a(0.3, -1.1), b(-2.0, 0.7);
    FTSeries lhs_arg = F;
    lhs_arg.scale(a);
    lhs_arg.add_scaled(G, b);
    FTSeries lhs = poisson(lhs_arg, H);
    FTSeries rhs = poisson(F, H);
    rhs.scale(a);
    rhs.add_scaled(poisson(G, H), b);
    CHECK(coeff_sup_diff(lhs, rhs) <= 1e-12);
  }
}

TEST_CASE("bracket Jacobi identity at low degree") {
  Rng rng(4242);
  const SeriesCaps gen{3, 2, 0.0};
  const SeriesCaps wide{8, 16, 0.0};  // wide caps: no truncation overflow
  for (int rep = 0; rep < 6; ++rep) {
    FTSeries F = rewrap(random_series(rng, kLat, gen, 12, 3, 2), wide);
    FTSeries G = rewrap(random_series(rng, kLat, gen, 12, 3, 2), wide);
    FTSeries H = rewrap(random_series(rng, kLat, gen, 12, 3, 2), wide);
    FTSeries J = poisson(F, poisson(G, H));
    J.add_scaled(poisson(G, poisson(H, F)), 1.0);
    J.add_scaled(poisson(H, poisson(F, G)), 1.0);
    CHECK(J.overflow().total() == 0);
    CHECK(J.coeff_sup() <= 1e-12);
  }
}

TEST_CASE("compact form and gauge invariance: pinned examples") {
  // e^{i theta_1} z_2 zbar_3 with pair (1,5): compact, not gauge invariant.
  FTSeries f = mono(Structure::mixed_angle_action,
                    make_mixed_key(1, 0, 0, 0, {{2, 1}}, {{3, 1}}), 1.0);
  CHECK(f.is_compact_form());
  CHECK(!f.is_gauge_invariant());

  // e^{i theta_1} z_2 zbar_2: not compact (momentum 1).
  FTSeries g = mono(Structure::mixed_angle_action,
                    make_mixed_key(1, 0, 0, 0, {{2, 1}}, {{2, 1}}), 1.0);
  std::vector<TermKey> bad;
  CHECK(!g.is_compact_form(&bad));
  CHECK(bad.size() == 1);

  // e^{i(theta_1 - theta_2)}: gauge invariant.
  FTSeries h = mono(Structure::mixed_angle_action,
                    make_mixed_key(1, -1, 0, 0, {}, {}), 1.0);
  CHECK(h.is_gauge_invariant());

  // A lone z_j is not.
  FTSeries z = mono(Structure::mixed_angle_action,
                    make_mixed_key(0, 0, 0, 0, {{4, 1}}, {}), 1.0);
  CHECK(!z.is_gauge_invariant());
}

TEST_CASE("special form: pinned examples and contract error") {
  FTSeries ok = mono(Structure::mixed_angle_action,
                     make_mixed_key(0, 0, 0, 0, {{3, 1}}, {{3, 1}}), 1.0);
  CHECK(ok.special_form_ok());
  CHECK(ok.assert_special_form());

  FTSeries bad = mono(Structure::mixed_angle_action,
                      make_mixed_key(1, 0, 0, 0, {{3, 1}}, {{3, 1}}), 1.0);
  std::vector<TermKey> v;
  CHECK(!bad.special_form_ok(&v));
  CHECK(v.size() == 1);
  CHECK(!bad.assert_special_form());

  // Static off-diagonal coupling is the other forbidden pattern.
  FTSeries off = mono(Structure::mixed_angle_action,
                      make_mixed_key(0, 0, 0, 0, {{2, 1}}, {{3, 1}}), 1.0);
  CHECK(!off.special_form_ok());

  // Pattern fine but predicates violated -> contract error names predicate.
  FTSeries loose = mono(Structure::mixed_angle_action,
                        make_mixed_key(1, 0, 0, 0, {{2, 1}}, {{2, 2}}), 1.0);
  CHECK(loose.special_form_ok());  // degree-3 term: outside the pattern scan
  CHECK_THROWS_WITH_AS(loose.assert_special_form(),
                       doctest::Contains("compact"), std::runtime_error);
}

TEST_CASE("invariant-series closure under the bracket") {
  Rng rng(2024);
  const SeriesCaps caps{4, 8, 1e-15};
  const ModeLattice lat(1, 5, 8);
  for (int rep = 0; rep < 50; ++rep) {
    FTSeries F = random_invariant_series(rng, lat, caps, 15, 4);
    FTSeries G = random_invariant_series(rng, lat, caps, 15, 4);
    REQUIRE(F.is_compact_form());
    REQUIRE(F.is_gauge_invariant());
    CHECK(F.special_form_ok());  // consequence of the two predicates
    FTSeries FG = poisson(F, G);
    CHECK(FG.is_compact_form());
    CHECK(FG.is_gauge_invariant());
    CHECK(FG.special_form_ok());
  }
}

TEST_CASE("truncation overflow is counted, never silent") {
  Rng rng(5);
  const SeriesCaps tight{4, 1, 0.0};
  FTSeries F = random_series(rng, kLat, tight, 20, 4, 1);
  FTSeries G = random_series(rng, kLat, tight, 20, 4, 1);
  FTSeries FG = poisson(F, G);
  // Degree-4 pairs produce degree-6 children; Fourier sums reach 2.
  CHECK(FG.overflow().total() > 0);
  CHECK(FG.overflow().max_dropped > 0.0);
  for (const auto& [t, c] : FG.terms()) {
    CHECK(t.degree() <= tight.degree_cap);
    CHECK(t.k_inf() <= tight.fourier_cap);
  }
}

TEST_CASE("derivative series and evaluation consistency") {
  // d/dI_1 of I_1^2 e^{i theta_2} = 2 I_1 e^{i theta_2}
  FTSeries f = mono(Structure::mixed_angle_action,
                    make_mixed_key(0, 1, 2, 0, {}, {}), 1.0);
  FTSeries df = f.d_dI(0);
  REQUIRE(df.size() == 1);
  CHECK(std::abs(df.coeff(make_mixed_key(0, 1, 1, 0, {}, {})) - cplx(2.0)) == 0.0);
  // d/dtheta_2 multiplies by i k_2.
  FTSeries dth = f.d_dtheta(1);
  CHECK(std::abs(dth.coeff(make_mixed_key(0, 1, 2, 0, {}, {})) - iu) == 0.0);
  // d/dzbar_3 of z_2 zbar_3^2 = 2 z_2 zbar_3.
  FTSeries g = mono(Structure::mixed_angle_action,
                    make_mixed_key(0, 0, 0, 0, {{2, 1}}, {{3, 2}}), 1.0);
  FTSeries dg = g.d_dz(3, true);
  REQUIRE(dg.size() == 1);
  CHECK(std::abs(dg.coeff(make_mixed_key(0, 0, 0, 0, {{2, 1}}, {{3, 1}})) -
                 cplx(2.0)) == 0.0);

  // eval and eval_gradients agree with the derivative series at random points.
  Rng rng(31);
  FTSeries P = random_series(rng, kLat, kCaps, 40, 4, 2);
  PhasePoint pt(kLat);
  pt.theta = {cplx(0.37, 0.11), cplx(-1.2, -0.05)};
  pt.I = {cplx(2e-2, 1e-3), cplx(-1e-2, 3e-3)};
  for (int j : kLat.all_modes()) {
    pt.z[kLat.dense_index(j)] = cplx(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
    pt.zbar[kLat.dense_index(j)] = cplx(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
  }
  PointGradients gr = P.eval_gradients(pt);
  CHECK(std::abs(gr.d_I[0] - P.d_dI(0).eval(pt)) <= 1e-12);
  CHECK(std::abs(gr.d_I[1] - P.d_dI(1).eval(pt)) <= 1e-12);
  CHECK(std::abs(gr.d_theta[0] - P.d_dtheta(0).eval(pt)) <= 1e-12);
  CHECK(std::abs(gr.d_z[kLat.dense_index(3)] - P.d_dz(3, false).eval(pt)) <= 1e-12);
  CHECK(std::abs(gr.d_zbar[kLat.dense_index(-2)] - P.d_dz(-2, true).eval(pt)) <= 1e-12);
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(77);
  FTSeries P = random_series(rng, kLat, kCaps, 40, 4, 2);
  PhasePoint pt(kLat);
  pt.theta = {cplx(0.2, 0.03), cplx(1.4, -0.02)};
  pt.I = {cplx(1.5e-2, 0.0), cplx(0.8e-2, 0.0)};
  for (int j : kLat.all_modes()) {
    pt.z[kLat.dense_index(j)] = cplx(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
    pt.zbar[kLat.dense_index(j)] = cplx(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1));
  }
  const PointGradients gr = P.eval_gradients(pt);
  const double h = 1e-6;

  auto fd = [&](auto setter) {
    PhasePoint a = pt, b = pt;
    setter(a, +h);
    setter(b, -h);
    return (P.eval(a) - P.eval(b)) / (2.0 * h);
  };

  for (int i = 0; i < 2; ++i) {
    cplx d = fd([&](PhasePoint& p, double e) { p.theta[i] += e; });
    CHECK(std::abs(d - gr.d_theta[i]) <= 1e-8);
    d = fd([&](PhasePoint& p, double e) { p.I[i] += e; });
    CHECK(std::abs(d - gr.d_I[i]) <= 1e-8);
  }
  for (int j : {3, -2, 7}) {
    cplx d = fd([&](PhasePoint& p, double e) { p.z[kLat.dense_index(j)] += e; });
    CHECK(std::abs(d - gr.d_z[kLat.dense_index(j)]) <= 1e-8);
    d = fd([&](PhasePoint& p, double e) { p.zbar[kLat.dense_index(j)] += e; });
    CHECK(std::abs(d - gr.d_zbar[kLat.dense_index(j)]) <= 1e-8);
  }
}

TEST_CASE("low-order truncation keeps angle terms, drops true constants") {
  FTSeries s(Structure::mixed_angle_action, kLat, kCaps);
  s.add_term(TermKey{}, 5.0);                                  // constant
  s.add_term(make_mixed_key(2, -1, 0, 0, {}, {}), 1.0);        // degree 0, k != 0
  s.add_term(make_mixed_key(0, 0, 1, 0, {}, {}), 2.0);         // degree 2
  s.add_term(make_mixed_key(0, 0, 1, 0, {{3, 1}}, {{3, 1}}), 3.0);  // degree 4
  FTSeries r = s.truncate_low(2);
  CHECK(r.size() == 2);
  CHECK(std::abs(r.coeff(make_mixed_key(2, -1, 0, 0, {}, {})) - cplx(1.0)) == 0.0);
  CHECK(std::abs(r.coeff(make_mixed_key(0, 0, 1, 0, {}, {})) - cplx(2.0)) == 0.0);
  CHECK(s.part_of_degree(4).size() == 1);
  CHECK(s.max_degree() == 4);
  CHECK(s.coeff_sup_degree(4) == 3.0);
}

TEST_CASE("reality defect detects non-real series") {
  FTSeries s(Structure::mixed_angle_action, kLat, kCaps);
  TermKey t = make_mixed_key(1, 0, 0, 0, {{2, 1}}, {{3, 1}});
  s.add_term(t, cplx(0.5, 0.25));
  s.add_term(t.conjugate(), std::conj(cplx(0.5, 0.25)));
  CHECK(s.reality_defect() == 0.0);
  s.add_term(make_mixed_key(0, 0, 1, 0, {}, {}), cplx(0.0, 1.0));
  // I_1 is self-conjugate: purely imaginary coefficient breaks reality by 2.
  CHECK(s.reality_defect() == doctest::Approx(2.0));
}

TEST_CASE("convolution: impulses, norm values, algebra inequality") {
  const ModeLattice lat(1, 5, 16);
  const double a = 0.1, p = 2.0;
  std::vector<cplx> w(lat.mode_count(), 0.0), v(lat.mode_count(), 0.0);
  w[lat.dense_index(1)] = 1.0;
  v[lat.dense_index(2)] = 1.0;
  auto wv = seq_convolve(w, v, lat);
  for (int j : lat.all_modes())
    CHECK(std::abs(wv[lat.dense_index(j)] - (j == 3 ? cplx(1.0) : cplx(0.0))) == 0.0);

  // || delta_n ||_{a,p} = |n|^p e^{a|n|}.
  for (int n : {1, -4, 7}) {
    std::vector<cplx> d(lat.mode_count(), 0.0);
    d[lat.dense_index(n)] = 1.0;
    CHECK(seq_norm_ap(d, lat, a, p) ==
          doctest::Approx(std::pow(std::abs(n), p) * std::exp(a * std::abs(n)))
              .epsilon(1e-14));
  }

  // Banach-algebra inequality ||w*v|| <= c ||w|| ||v||: measure the worst
  // ratio over a deterministic family (all impulse pairs plus random
  // support-8 vectors).  The impulse pair (1, 1) attains ratio
  // |2|^p e^{a*2} / (e^{a} e^{a}) = 4 exactly at p = 2, and nothing in the
  // family exceeds it.
  Rng rng(11);
  double worst = 0.0;
  for (int n : lat.all_modes()) {
    for (int m : lat.all_modes()) {
      std::vector<cplx> x(lat.mode_count(), 0.0), y(lat.mode_count(), 0.0);
      x[lat.dense_index(n)] = 1.0;
      y[lat.dense_index(m)] = 1.0;
      const double num = seq_norm_ap(seq_convolve(x, y, lat), lat, a, p);
      worst = std::max(worst, num / (seq_norm_ap(x, lat, a, p) *
                                     seq_norm_ap(y, lat, a, p)));
    }
  }
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<cplx> x(lat.mode_count(), 0.0), y(lat.mode_count(), 0.0);
    for (int i = 0; i < 8; ++i) {
      const auto modes = lat.all_modes();
      x[lat.dense_index(modes[rng.below(modes.size())])] +=
          cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
      y[lat.dense_index(modes[rng.below(modes.size())])] +=
          cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    }
    const double nx = seq_norm_ap(x, lat, a, p), ny = seq_norm_ap(y, lat, a, p);
    if (nx == 0.0 || ny == 0.0) continue;
    worst = std::max(worst,
                     seq_norm_ap(seq_convolve(x, y, lat), lat, a, p) / (nx * ny));
  }
  CHECK(worst == doctest::Approx(4.0).epsilon(1e-12));

  // Norm monotonicity in the polynomial weight: ||.||_{a,q} <= ||.||_{a,p}
  // for q <= p (|j| >= 1 on the zero-mean lattice).
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<cplx> x(lat.mode_count(), 0.0);
    for (int j : lat.all_modes())
      x[lat.dense_index(j)] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(seq_norm_ap(x, lat, a, 1.0) <= seq_norm_ap(x, lat, a, 2.0) + 1e-15);
  }
}

TEST_CASE("vector field norm: pinned values") {
  WeightedNorms nm;
  nm.r = 0.07;
  VectorField W;
  W.X = {cplx(1.0), cplx(0.0)};
  CHECK(vector_field_norm(W, kLat, nm) == doctest::Approx(1.0).epsilon(1e-15));
  VectorField W2;
  W2.Y = {cplx(nm.r * nm.r), cplx(0.0)};
  CHECK(vector_field_norm(W2, kLat, nm) == doctest::Approx(1.0).epsilon(1e-15));
  // Invalid parameter bundles are rejected.
  WeightedNorms bad;
  bad.q = 0.5;
  CHECK_THROWS(vector_field_norm(W, kLat, bad));
}

TEST_CASE("JSON round-trip is byte-exact") {
  Rng rng(321);
  FTSeries s = random_invariant_series(rng, ModeLattice(1, 5, 8), kCaps, 60, 4);
  const json doc1 = series_to_json(s);
  const std::string text1 = dump_canonical(doc1);
  FTSeries back = series_from_json(doc1);
  const std::string text2 = dump_canonical(series_to_json(back));
  CHECK(text1 == text2);
  CHECK(back.size() == s.size());
  for (const auto& [t, c] : s.terms()) {
    const cplx cb = back.coeff(t);
    CHECK(cb.real() == c.real());  // bit-exact, not approximate
    CHECK(cb.imag() == c.imag());
  }
  // Exercise awkward doubles explicitly.
  FTSeries q(Structure::lattice_qqbar, ModeLattice(1, 5, 8), kCaps);
  q.add_term(make_qq_key({{1, 1}}, {{1, 1}}), cplx(0.1, -1.0 / 3.0));
  q.add_term(make_qq_key({{5, 1}}, {{5, 1}}), cplx(1e-308, 2.5e17));
  FTSeries qb = series_from_json(series_to_json(q));
  for (const auto& [t, c] : q.terms()) {
    CHECK(qb.coeff(t).real() == c.real());
    CHECK(qb.coeff(t).imag() == c.imag());
  }
}

TEST_CASE("golden comparison honors per-field tolerances") {
  json manifest = {{"default", 0.0},
                   {"fields", {{"/metrics/*/value", 1e-3}, {"/note", 0.0}}}};
  json a = {{"metrics", {{{"value", 1.0}}, {{"value", 2.0}}}}, {"note", "x"}};
  json b = {{"metrics", {{{"value", 1.0004}}, {{"value", 2.0}}}}, {"note", "x"}};
  CHECK(golden_compare(a, b, manifest).ok);
  json c = {{"metrics", {{{"value", 1.002}}, {{"value", 2.0}}}}, {"note", "x"}};
  CHECK(!golden_compare(c, b, manifest).ok);
  json d = {{"metrics", {{{"value", 1.0}}, {{"value", 2.0}}}}, {"note", "y"}};
  auto diff = golden_compare(d, b, manifest);
  CHECK(!diff.ok);
  REQUIRE(diff.lines.size() == 1);
  CHECK(diff.lines[0].find("/note") != std::string::npos);
  // Structural mismatches are always failures.
  json e = {{"metrics", {{{"value", 1.0}}}}, {"note", "x"}};
  CHECK(!golden_compare(e, b, manifest).ok);
}
