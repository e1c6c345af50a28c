#include "dnls/action_angle.hpp"

#include <cmath>
#include <numbers>

namespace dnls {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Generalized binomial coefficient C(x, s) as a product; exact zeros for
// integer x with s > x.
double binom_gen(double x, int s) {
  double v = 1.0;
  for (int t = 1; t <= s; ++t) v *= (x - double(t - 1)) / double(t);
  return v;
}

}  // namespace

FTSeries to_action_angle(const FTSeries& F, const std::array<double, 2>& xi,
                         int taylor_order) {
  DNLS_CHECK(F.structure() == Structure::lattice_qqbar,
             "to_action_angle: input must be a (q,qbar) series");
  DNLS_CHECK(xi[0] > 0.0 && xi[1] > 0.0,
             "to_action_angle: singular substitution at xi = 0");
  DNLS_CHECK(taylor_order >= 0, "to_action_angle: negative Taylor order");

  const ModeLattice& lat = F.lattice();
  const int n[2] = {lat.n1, lat.n2};
  FTSeries out(Structure::mixed_angle_action, lat, F.caps());
  out.reserve(F.size());

  std::vector<std::pair<int, int>> alpha_n, beta_n;
  for (const auto& [t, c] : F.terms()) {
    int a[2], b[2], k[2], s_max[2];
    std::array<std::vector<double>, 2> w;  // radial expansion coefficients
    for (int i = 0; i < 2; ++i) {
      a[i] = t.alpha(n[i]);
      b[i] = t.beta(n[i]);
      k[i] = a[i] - b[i];
      const int m = a[i] + b[i];
      // (I + xi)^{m/2} = sum_s C(m/2, s) xi^{m/2 - s} I^s: exact polynomial
      // for even m (the product formula yields exact zeros past s = m/2),
      // truncated at taylor_order for odd m.
      s_max[i] = (m % 2 == 0) ? m / 2 : taylor_order;
      w[i].resize(std::size_t(s_max[i]) + 1);
      for (int s = 0; s <= s_max[i]; ++s)
        w[i][std::size_t(s)] =
            binom_gen(0.5 * m, s) * std::pow(xi[i], 0.5 * m - s);
    }

    alpha_n.clear();
    beta_n.clear();
    for (int s = 0; s < t.n_alpha; ++s)
      if (!lat.is_tangential(t.a_mode[s]))
        alpha_n.emplace_back(t.a_mode[s], t.a_pow[s]);
    for (int s = 0; s < t.n_beta; ++s)
      if (!lat.is_tangential(t.b_mode[s]))
        beta_n.emplace_back(t.b_mode[s], t.b_pow[s]);

    for (int s1 = 0; s1 <= s_max[0]; ++s1)
      for (int s2 = 0; s2 <= s_max[1]; ++s2) {
        const double f = w[0][std::size_t(s1)] * w[1][std::size_t(s2)];
        if (f == 0.0) continue;
        out.add_term(make_mixed_key(k[0], k[1], s1, s2, alpha_n, beta_n),
                     c * f);
      }
  }
  out.prune();
  return out;
}

bool action_gate_ok(const std::array<cplx, 2>& I,
                    const std::array<double, 2>& xi, double max_ratio) {
  DNLS_CHECK(xi[0] > 0.0 && xi[1] > 0.0, "action gate: xi must be positive");
  return std::abs(I[0]) <= max_ratio * xi[0] &&
         std::abs(I[1]) <= max_ratio * xi[1];
}

FTSeries rescale(const FTSeries& H, double epsilon) {
  DNLS_CHECK(H.structure() == Structure::mixed_angle_action,
             "rescale: input must be an angle-action series");
  DNLS_CHECK(epsilon > 0.0 && epsilon < 1.0,
             "rescale: epsilon must lie in (0, 1)");
  FTSeries out(H.structure(), H.lattice(), H.caps());
  out.reserve(H.size());
  for (const auto& [t, c] : H.terms()) {
    if (t.degree() == 0 && t.k[0] == 0 && t.k[1] == 0) continue;  // constant
    const int grade = 6 * (int(t.l[0]) + int(t.l[1])) + 3 * t.z_degree() - 10;
    out.add_term(t, c * std::pow(epsilon, grade));
  }
  return out;
}

MassReduction mass_reduction(const std::array<double, 2>& xi,
                             const std::array<double, 2>& I,
                             const std::vector<cplx>& z, double epsilon) {
  DNLS_CHECK(epsilon > 0.0, "mass_reduction: epsilon must be positive");
  const double e4 = std::pow(epsilon, 4), e6 = std::pow(epsilon, 6);
  double z2 = 0.0;
  for (const cplx& v : z) z2 += std::norm(v);
  double phys = 0.0;  // physical mass of the rescaled state
  for (int i = 0; i < 2; ++i) {
    const double mode_mass = e4 * xi[i] + e6 * I[i];
    DNLS_CHECK(mode_mass >= 0.0, "mass_reduction: negative mass");
    phys += mode_mass;
  }
  phys += e6 * z2;

  MassReduction out;
  out.c = phys / e4;
  const double S = I[0] + I[1] + z2;
  out.residual = std::abs(xi[0] + xi[1] - (out.c - epsilon * epsilon * S));
  return out;
}

FTSeries mass_quadratic(const ModeLattice& lat, const SeriesCaps& caps) {
  FTSeries s(Structure::mixed_angle_action, lat, caps);
  s.add_term(make_mixed_key(0, 0, 1, 0, {}, {}), 1.0);
  s.add_term(make_mixed_key(0, 0, 0, 1, {}, {}), 1.0);
  for (int j : lat.normal_modes())
    s.add_term(make_mixed_key(0, 0, 0, 0, {{j, 1}}, {{j, 1}}), 1.0);
  return s;
}

namespace {

// -(eps^2 / 2pi) S * W for a diagonal quadratic weight series W.
FTSeries elimination_product(const ModeLattice& lat, const SeriesCaps& caps,
                             double epsilon, const FTSeries& weight) {
  FTSeries out = mul(mass_quadratic(lat, caps), weight);
  out.scale(-epsilon * epsilon / kTwoPi);
  return out;
}

}  // namespace

FTSeries mass_elimination_exact(const ModeLattice& lat, const SeriesCaps& caps,
                                double epsilon) {
  FTSeries weight(Structure::mixed_angle_action, lat, caps);
  const double tangential = double(lat.n1 + lat.n2);
  weight.add_term(make_mixed_key(0, 0, 1, 0, {}, {}), tangential);
  weight.add_term(make_mixed_key(0, 0, 0, 1, {}, {}), tangential);
  for (int j : lat.normal_modes())
    weight.add_term(make_mixed_key(0, 0, 0, 0, {{j, 1}}, {{j, 1}}),
                    double(j));
  return elimination_product(lat, caps, epsilon, weight);
}

FTSeries mass_elimination_square(const ModeLattice& lat,
                                 const SeriesCaps& caps, double epsilon) {
  FTSeries S = mass_quadratic(lat, caps);
  FTSeries out = elimination_product(lat, caps, epsilon, S);
  out.scale(double(lat.n1 + lat.n2));
  return out;
}

}  // namespace dnls
