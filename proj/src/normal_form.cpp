#include "dnls/normal_form.hpp"

#include <string>

namespace dnls {

QuadrupleClass classify(int i, int j, int k, int l, const ModeLattice& pair) {
  DNLS_CHECK(i + j == k + l, "classify: quadruple violates i + j = k + l");
  QuadrupleClass c;
  c.diagonal = (i == k && j == l) || (i == l && j == k);
  c.m_out = 0;
  for (int v : {i, j, k, l})
    if (!pair.is_tangential(v)) ++c.m_out;
  return c;
}

long small_divisor(int i, int j, int k, int l) {
  DNLS_CHECK(i + j == k + l, "small_divisor: quadruple violates i + j = k + l");
  return long(i) * i + long(j) * j - long(k) * k - long(l) * l;
}

namespace {

// Expand a quartic monomial key into the canonical quadruple (i <= j from
// alpha, k <= l from beta).
void quartic_indices(const TermKey& t, int& i, int& j, int& k, int& l) {
  DNLS_CHECK(t.z_degree() == 4 && t.l[0] == 0 && t.l[1] == 0 && t.k[0] == 0 &&
                 t.k[1] == 0,
             "quartic split: series must be a pure degree-4 (q,qbar) polynomial");
  int a[2], n = 0;
  for (int s = 0; s < t.n_alpha; ++s)
    for (int p = 0; p < t.a_pow[s]; ++p) a[n++] = t.a_mode[s];
  DNLS_CHECK(n == 2, "quartic split: |alpha| must be 2");
  int b[2], m = 0;
  for (int s = 0; s < t.n_beta; ++s)
    for (int p = 0; p < t.b_pow[s]; ++p) b[m++] = t.b_mode[s];
  DNLS_CHECK(m == 2, "quartic split: |beta| must be 2");
  i = a[0];
  j = a[1];
  k = b[0];
  l = b[1];
}

}  // namespace

QuarticSplit split_quartic(const FTSeries& G) {
  const ModeLattice& lat = G.lattice();
  QuarticSplit out{FTSeries(G.structure(), lat, G.caps()),
                   FTSeries(G.structure(), lat, G.caps()),
                   FTSeries(G.structure(), lat, G.caps())};
  for (const auto& [t, c] : G.terms()) {
    int i, j, k, l;
    quartic_indices(t, i, j, k, l);
    const QuadrupleClass cls = classify(i, j, k, l, lat);
    if (cls.in_resonant_support())
      out.resonant.add_term(t, c);
    else if (cls.in_high_support())
      out.high.add_term(t, c);
    else
      out.removable.add_term(t, c);
  }
  return out;
}

FTSeries birkhoff_generator(const FTSeries& G) {
  const QuarticSplit split = split_quartic(G);
  FTSeries F(G.structure(), G.lattice(), G.caps());
  F.reserve(split.removable.size());
  for (const auto& [t, c] : split.removable.terms()) {
    int i, j, k, l;
    quartic_indices(t, i, j, k, l);
    const long div = small_divisor(i, j, k, l);
    DNLS_CHECK(div != 0,
               "birkhoff_generator: zero divisor on the removable support at "
               "quadruple (" +
                   std::to_string(i) + "," + std::to_string(j) + "," +
                   std::to_string(k) + "," + std::to_string(l) + ")");
    F.add_term(t, iu * c / double(div));
  }
  return F;
}

FTSeries lie_transform(const FTSeries& H, const FTSeries& F, int order_cap,
                       Overflow* ovf, bool* tail_warning) {
  DNLS_CHECK(order_cap >= 2, "lie_transform: order_cap must be >= 2");
  FTSeries out = H;
  FTSeries tower = H;  // ad_F^m(H) / m!
  double prev_norm = tower.coeff_sup();
  int growth_streak = 0;
  if (tail_warning) *tail_warning = false;
  for (int m = 1; m <= order_cap; ++m) {
    FTSeries next = poisson(tower, F);
    next.scale(1.0 / double(m));
    if (ovf) ovf->merge(next.overflow());
    tower = std::move(next);
    if (tower.empty()) break;
    out.add_scaled(tower, 1.0);
    const double norm = tower.coeff_sup();
    growth_streak = (norm > prev_norm) ? growth_streak + 1 : 0;
    if (growth_streak >= 3 && tail_warning) *tail_warning = true;
    prev_norm = norm;
  }
  if (ovf) ovf->merge(out.overflow());
  out.prune();
  return out;
}

BirkhoffResult normal_form_4(const LatticeHamiltonian& H, int order_cap) {
  const QuarticSplit split = split_quartic(H.quartic);
  FTSeries F = birkhoff_generator(H.quartic);

  BirkhoffResult res{H.lambda,        split.resonant, split.high,
                     FTSeries(H.lambda.structure(), H.lattice, H.lambda.caps()),
                     F,               Overflow{},     false};

  FTSeries transformed =
      lie_transform(H.full(), F, order_cap, &res.overflow, &res.tail_warning);
  // K = transformed - (Lambda + G_bar + G_hat); degree >= 6 by construction.
  FTSeries K = transformed;
  K.add_scaled(res.lambda, -1.0);
  K.add_scaled(res.g_bar, -1.0);
  K.add_scaled(res.g_hat, -1.0);
  K.prune(1e-13);  // cancel the quadratic/quartic algebra exactly
  res.K = std::move(K);
  return res;
}

}  // namespace dnls
