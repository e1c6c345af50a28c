#include "dnls/frequency.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dnls/action_angle.hpp"
#include "dnls/util.hpp"

namespace dnls {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;
}  // namespace

double FrequencyMap::inv_eps4() const {
  DNLS_CHECK(epsilon > 0.0, "frequency map: epsilon must be positive");
  return 1.0 / (epsilon * epsilon * epsilon * epsilon);
}

SplitVal FrequencyMap::omega_split(int which,
                                   const std::array<double, 2>& xi) const {
  DNLS_CHECK(which == 0 || which == 1, "frequency map: tangential slot");
  const double n_this = (which == 0) ? lat.n1 : lat.n2;
  const double n_other = (which == 0) ? lat.n2 : lat.n1;
  const double sum = double(lat.n1) + double(lat.n2);
  const long long sq = (which == 0) ? (long long)(lat.n1) * lat.n1
                                    : (long long)(lat.n2) * lat.n2;
  switch (variant) {
    case FreqVariant::unreduced:
      return {sq, (n_this * xi[std::size_t(which)] +
                   sum * xi[std::size_t(1 - which)]) /
                      kTwoPi};
    case FreqVariant::reduced:
      return {sq, (sum * c - n_other * xi[std::size_t(which)]) / kTwoPi};
    case FreqVariant::displayed:
      return {sq, (sum * c + (n_this - n_other) * xi[std::size_t(which)]) /
                      kFourPi};
  }
  DNLS_CHECK(false, "frequency map: unknown variant");
  return {};
}

SplitVal FrequencyMap::Omega_split(int j,
                                   const std::array<double, 2>& xi) const {
  DNLS_CHECK(j != 0 && !lat.is_tangential(j),
             "frequency map: normal index expected");
  const long long sq = (long long)(j)*j;
  const double n1 = lat.n1, n2 = lat.n2;
  switch (variant) {
    case FreqVariant::unreduced:
      return {sq, ((n1 + j) * xi[0] + (n2 + j) * xi[1]) / kTwoPi};
    case FreqVariant::reduced:
      return {sq, (c * j + n1 * xi[0] + n2 * xi[1]) / kTwoPi};
    case FreqVariant::displayed:
      return {sq, (c * j + n1 * xi[0] + n2 * xi[1]) / kFourPi};
  }
  DNLS_CHECK(false, "frequency map: unknown variant");
  return {};
}

FrequencyTable frequencies_from_series(const FTSeries& lambda,
                                       const FTSeries& g_bar,
                                       const std::array<double, 2>& xi) {
  const ModeLattice& lat = lambda.lattice();
  const FTSeries N = to_action_angle(add(lambda, g_bar), xi);
  FrequencyTable out;
  out.omega[0] = N.coeff(make_mixed_key(0, 0, 1, 0, {}, {})).real();
  out.omega[1] = N.coeff(make_mixed_key(0, 0, 0, 1, {}, {})).real();
  out.Omega.assign(std::size_t(lat.mode_count()), 0.0);
  for (int j : lat.normal_modes())
    out.Omega[std::size_t(lat.dense_index(j))] =
        N.coeff(make_mixed_key(0, 0, 0, 0, {{j, 1}}, {{j, 1}})).real();
  return out;
}

namespace {

LBracket l_bracket_impl(const std::vector<std::pair<int, int>>& l,
                        double delta, bool signed_moment) {
  LBracket out;
  long long moment = 0;
  for (const auto& [j, lj] : l) {
    DNLS_CHECK(j != 0, "l_bracket: zero mode in support");
    out.abs += std::abs(lj);
    out.weighted += std::pow(std::abs(j), delta) * std::abs(lj);
    moment += signed_moment ? (long long)(j)*lj
                            : (long long)(std::abs(j)) * lj;
  }
  out.angle = std::max(1.0, std::llabs(moment) * out.weighted);
  return out;
}

}  // namespace

LBracket l_bracket(const std::vector<std::pair<int, int>>& l, double delta) {
  return l_bracket_impl(l, delta, true);
}

LBracket l_bracket_unsigned(const std::vector<std::pair<int, int>>& l,
                            double delta) {
  return l_bracket_impl(l, delta, false);
}

Nondegeneracy nondegeneracy(const ModeLattice& pair, double c, double epsilon,
                            int J_max, int samples, std::uint64_t seed,
                            double xi_floor) {
  DNLS_CHECK(J_max >= 1, "nondegeneracy: J_max must be positive");
  DNLS_CHECK(samples >= 1, "nondegeneracy: sample count must be positive");
  DNLS_CHECK(xi_floor > 0.0 && xi_floor < 1.0,
             "nondegeneracy: xi floor must lie in (0,1)");

  Nondegeneracy out;
  out.A[0][0] = double(pair.n1 - pair.n2) / kFourPi;
  out.A[1][1] = double(pair.n2 - pair.n1) / kFourPi;
  out.A[0][1] = out.A[1][0] = 0.0;
  out.detA = out.A[0][0] * out.A[1][1] - out.A[0][1] * out.A[1][0];

  FrequencyMap fm{pair, FreqVariant::displayed, c, epsilon};
  const double inv4 = fm.inv_eps4();

  std::vector<int> sites;
  for (int j = -J_max; j <= J_max; ++j)
    if (j != 0 && !pair.is_tangential(j)) sites.push_back(j);

  Rng rng(seed);
  double m = std::numeric_limits<double>::infinity();
  const auto probe = [&](double num, double angle) {
    m = std::min(m, std::abs(num) / angle);
  };
  for (int trial = 0; trial < samples; ++trial) {
    const std::array<double, 2> xi = {rng.uniform(xi_floor, 1.0),
                                      rng.uniform(xi_floor, 1.0)};
    for (std::size_t a = 0; a < sites.size(); ++a) {
      const int i = sites[a];
      const SplitVal Oi = fm.Omega_split(i, xi);
      probe(Oi.value(inv4), l_bracket_unsigned({{i, 1}}, 1.0).angle);
      for (std::size_t b = a; b < sites.size(); ++b) {
        const int j = sites[b];
        const SplitVal Oj = fm.Omega_split(j, xi);
        probe((Oi + Oj).value(inv4),
              l_bracket_unsigned({{i, 1}, {j, 1}}, 1.0).angle);
        if (std::abs(i) != std::abs(j))
          probe((Oi - Oj).value(inv4),
                l_bracket_unsigned({{i, 1}, {j, -1}}, 1.0).angle);
      }
    }
  }
  out.m = m;
  return out;
}

}  // namespace dnls
