#include "dnls/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "dnls/util.hpp"

namespace dnls {

namespace {

// Normal sites within the cutoff, packed with their weight powers.
struct SiteTable {
  std::vector<int> sites;
  std::vector<double> w_delta;      // |j|^delta
  std::vector<double> w_one_delta;  // |j|^{1+delta}
  std::vector<int> reflect_index;   // index of -j, or -1 if -j is not a site
};

SiteTable build_sites(const ModeLattice& lat, const DiophantineParams& p) {
  SiteTable t;
  std::vector<int> index_of(2 * p.J_max + 1, -1);
  for (int j = -p.J_max; j <= p.J_max; ++j) {
    if (j == 0 || lat.is_tangential(j)) continue;
    index_of[j + p.J_max] = static_cast<int>(t.sites.size());
    t.sites.push_back(j);
    t.w_delta.push_back(std::pow(std::abs(j), p.delta));
    t.w_one_delta.push_back(std::pow(std::abs(j), 1.0 + p.delta));
  }
  t.reflect_index.resize(t.sites.size(), -1);
  for (std::size_t a = 0; a < t.sites.size(); ++a)
    t.reflect_index[a] = index_of[-t.sites[a] + p.J_max];
  return t;
}

// Split frequency evaluations at one parameter point, packed by site order.
struct FreqEval {
  std::array<long long, 2> omega_ip{{0, 0}};
  std::array<double, 2> omega_fr{{0.0, 0.0}};
  std::vector<long long> Omega_ip;
  std::vector<double> Omega_fr;
};

FreqEval eval_tables(const FrequencyMap& fm, const SiteTable& t,
                     const std::array<double, 2>& xi) {
  FreqEval e;
  for (int w = 0; w < 2; ++w) {
    const SplitVal v = fm.omega_split(w, xi);
    e.omega_ip[w] = v.ipart;
    e.omega_fr[w] = v.frac;
  }
  e.Omega_ip.reserve(t.sites.size());
  e.Omega_fr.reserve(t.sites.size());
  for (int j : t.sites) {
    const SplitVal v = fm.Omega_split(j, xi);
    e.Omega_ip.push_back(v.ipart);
    e.Omega_fr.push_back(v.frac);
  }
  return e;
}

// Visits every condition within the cutoffs exactly once.  The callback
// receives site indices into the table (-1 when the slot is unused) so
// consumers can read precomputed per-site data without lookups.
template <class Fn>
void for_each_condition(const SiteTable& t, const DiophantineParams& p,
                        double reflect_ratio, Fn&& fn) {
  const int S = static_cast<int>(t.sites.size());
  std::vector<double> inv_ktau(p.K_max + 1, 0.0);
  for (int n = 1; n <= p.K_max; ++n) inv_ktau[n] = std::pow(n, -p.tau);

  for (int k1 = -p.K_max; k1 <= p.K_max; ++k1) {
    const int rest = p.K_max - std::abs(k1);
    for (int k2 = -rest; k2 <= rest; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      const int knorm = std::abs(k1) + std::abs(k2);
      const double kt = inv_ktau[knorm];

      fn(Family::k, k1, k2, -1, -1, 0, 0, kt);

      for (int b = 0; b < S; ++b) {
        const double w = t.w_one_delta[b] * kt;
        fn(Family::kj, k1, k2, -1, b, 0, +1, w);
        fn(Family::kj, k1, k2, -1, b, 0, -1, w);
      }

      for (int a = 0; a < S; ++a) {
        const double wa = t.w_delta[a];
        const double na = std::abs(t.sites[a]);
        for (int b = a; b < S; ++b) {
          const double w =
              (na + std::abs(t.sites[b])) * (wa + t.w_delta[b]) * kt;
          fn(Family::kij_same, k1, k2, a, b, +1, +1, w);
          fn(Family::kij_same, k1, k2, a, b, -1, -1, w);
        }
      }

      for (int a = 0; a < S; ++a) {
        const double wa = t.w_delta[a];
        const int na = std::abs(t.sites[a]);
        for (int b = 0; b < S; ++b) {
          const int nb = std::abs(t.sites[b]);
          if (na == nb) continue;
          const double w = std::abs(na - nb) * (wa + t.w_delta[b]) * kt;
          fn(Family::kij_diff, k1, k2, a, b, +1, -1, w);
        }
      }

      const double jr_max = reflect_ratio * knorm;
      for (int a = 0; a < S; ++a) {
        const int r = t.reflect_index[a];
        if (r < 0) continue;
        if (std::abs(t.sites[a]) > jr_max) continue;
        fn(Family::kj_reflect, k1, k2, a, r, +1, -1, t.w_delta[a] * kt);
      }
    }
  }
}

double reflect_cutoff_ratio(const ModeLattice& lat) {
  return 0.5 * std::max(std::abs(lat.n1), std::abs(lat.n2));
}

void check_basic(const DiophantineParams& p) {
  DNLS_CHECK(p.gamma >= 0.0, "diophantine: gamma must be nonnegative");
  DNLS_CHECK(p.tau >= 5.0, "diophantine: tau must be at least 5");
  DNLS_CHECK(p.K_max >= 1 && p.J_max >= 1,
             "diophantine: cutoffs must be positive");
  DNLS_CHECK(p.delta > 0.0, "diophantine: delta must be positive");
}

}  // namespace

void DiophantineParams::validate(double m_floor) const {
  check_basic(*this);
  DNLS_CHECK(gamma > 0.0, "diophantine: gamma must be positive");
  DNLS_CHECK(gamma <= 0.5 * m_floor,
             "diophantine: gamma must not exceed half the nondegeneracy floor");
}

const char* family_tag(Family f) {
  switch (f) {
    case Family::k: return "k";
    case Family::kj: return "kj+-";
    case Family::kij_same: return "kij++--";
    case Family::kij_diff: return "kij+-";
    case Family::kj_reflect: return "kj(-j)";
  }
  return "?";
}

std::vector<std::pair<int, int>> violation_l(const Violation& v) {
  switch (v.family) {
    case Family::k: return {};
    case Family::kj: return {{v.j, v.sj}};
    default: return {{v.i, v.si}, {v.j, v.sj}};
  }
}

ResonanceReport diophantine_report(const std::array<double, 2>& xi,
                                   const FrequencyMap& freq,
                                   const DiophantineParams& params) {
  check_basic(params);
  const SiteTable t = build_sites(freq.lat, params);
  const FreqEval e = eval_tables(freq, t, xi);
  const double inv4 = freq.inv_eps4();
  const double gamma = params.gamma;

  ResonanceReport report;
  report.xi = xi;
  for_each_condition(
      t, params, reflect_cutoff_ratio(freq.lat),
      [&](Family f, int k1, int k2, int ia, int ib, int si, int sj, double w) {
        long long ip = k1 * e.omega_ip[0] + k2 * e.omega_ip[1];
        double fr = k1 * e.omega_fr[0] + k2 * e.omega_fr[1];
        if (ia >= 0) {
          ip += si * e.Omega_ip[ia];
          fr += si * e.Omega_fr[ia];
        }
        if (ib >= 0) {
          ip += sj * e.Omega_ip[ib];
          fr += sj * e.Omega_fr[ib];
        }
        const double lhs =
            std::abs(ip == 0 ? fr : static_cast<double>(ip) * inv4 + fr);
        const double margin = lhs - gamma * w;
        if (margin < 0.0) {
          Violation v;
          v.family = f;
          v.k = {k1, k2};
          v.i = ia >= 0 ? t.sites[ia] : 0;
          v.j = ib >= 0 ? t.sites[ib] : 0;
          v.si = ia >= 0 ? si : 0;
          v.sj = ib >= 0 ? sj : 0;
          v.margin = margin;
          report.violations.push_back(v);
        }
      });
  return report;
}

std::vector<Candidate> enumerate_candidates(const FrequencyMap& freq,
                                            const DiophantineParams& params) {
  check_basic(params);
  const SiteTable t = build_sites(freq.lat, params);
  // The combination is affine in xi for every frequency variant, so three
  // probe evaluations recover its exact coefficients.
  const FreqEval e00 = eval_tables(freq, t, {0.0, 0.0});
  const FreqEval e10 = eval_tables(freq, t, {1.0, 0.0});
  const FreqEval e01 = eval_tables(freq, t, {0.0, 1.0});

  std::vector<Candidate> out;
  for_each_condition(
      t, params, reflect_cutoff_ratio(freq.lat),
      [&](Family f, int k1, int k2, int ia, int ib, int si, int sj, double w) {
        long long ip = k1 * e00.omega_ip[0] + k2 * e00.omega_ip[1];
        if (ia >= 0) ip += si * e00.Omega_ip[ia];
        if (ib >= 0) ip += sj * e00.Omega_ip[ib];
        if (ip != 0) return;

        auto frac_at = [&](const FreqEval& e) {
          double fr = k1 * e.omega_fr[0] + k2 * e.omega_fr[1];
          if (ia >= 0) fr += si * e.Omega_fr[ia];
          if (ib >= 0) fr += sj * e.Omega_fr[ib];
          return fr;
        };
        Candidate c;
        c.family = f;
        c.k = {k1, k2};
        c.i = ia >= 0 ? t.sites[ia] : 0;
        c.j = ib >= 0 ? t.sites[ib] : 0;
        c.si = ia >= 0 ? si : 0;
        c.sj = ib >= 0 ? sj : 0;
        c.a0 = frac_at(e00);
        c.a1 = frac_at(e10) - c.a0;
        c.a2 = frac_at(e01) - c.a0;
        c.weight = w;
        out.push_back(c);
      });
  return out;
}

double crossover_floor(const std::array<double, 2>& xi,
                       const FrequencyMap& freq,
                       const DiophantineParams& params) {
  check_basic(params);
  const SiteTable t = build_sites(freq.lat, params);
  const FreqEval e = eval_tables(freq, t, xi);
  const double inv4 = freq.inv_eps4();

  double floor_ratio = std::numeric_limits<double>::infinity();
  for_each_condition(
      t, params, reflect_cutoff_ratio(freq.lat),
      [&](Family, int k1, int k2, int ia, int ib, int si, int sj, double w) {
        long long ip = k1 * e.omega_ip[0] + k2 * e.omega_ip[1];
        double fr = k1 * e.omega_fr[0] + k2 * e.omega_fr[1];
        if (ia >= 0) {
          ip += si * e.Omega_ip[ia];
          fr += si * e.Omega_fr[ia];
        }
        if (ib >= 0) {
          ip += sj * e.Omega_ip[ib];
          fr += sj * e.Omega_fr[ib];
        }
        if (ip == 0) return;
        const double ratio = std::abs(static_cast<double>(ip) * inv4 + fr) / w;
        floor_ratio = std::min(floor_ratio, ratio);
      });
  return floor_ratio;
}

}  // namespace dnls
