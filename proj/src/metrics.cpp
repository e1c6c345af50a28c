#include "dnls/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dnls/diophantine.hpp"
#include "dnls/frequency.hpp"
#include "dnls/kam.hpp"
#include "dnls/measure.hpp"
#include "dnls/model.hpp"
#include "dnls/normal_form.hpp"
#include "dnls/sim.hpp"
#include "dnls/spectrum.hpp"
#include "dnls/util.hpp"

namespace dnls {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kPi = std::numbers::pi;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Accumulates the verdict: the first failed condition names the result.
struct Gate {
  bool ok = true;
  std::string note;

  void require(bool cond, const std::string& why) {
    if (cond) return;
    ok = false;
    if (note.empty()) note = why;
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

double CriterionResult::metric_value(const std::string& key) const {
  for (const auto& [k, v] : metrics)
    if (k == key) return v;
  throw std::runtime_error("criterion result: no metric named " + key);
}

// --------------------------------------------------------------------- 1
// The bracket of two structured series is again structured: momentum
// compactness, gauge invariance, and the quadratic special form all
// survive, over a batch of random draws.
CriterionResult criterion_bracket_structure(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 1;
  res.name = criterion_name(1);
  Gate g;

  const ModeLattice lat(k.n1, k.n2, k.j_max);
  Rng rng(k.bracket_seed);
  long input_bad = 0;
  long bracket_bad = 0;
  long max_terms = 0;
  for (int rep = 0; rep < k.bracket_pairs; ++rep) {
    const FTSeries A =
        random_invariant_series(rng, lat, k.caps, k.bracket_terms, 4);
    const FTSeries B =
        random_invariant_series(rng, lat, k.caps, k.bracket_terms, 4);
    for (const FTSeries* s : {&A, &B})
      if (!s->is_compact_form() || !s->is_gauge_invariant() ||
          !s->special_form_ok())
        ++input_bad;
    const FTSeries AB = poisson(A, B);
    max_terms = std::max(max_terms, static_cast<long>(AB.size()));
    if (!AB.is_compact_form() || !AB.is_gauge_invariant() ||
        !AB.special_form_ok())
      ++bracket_bad;
  }
  g.require(k.bracket_pairs > 0, "no pairs requested");
  g.require(input_bad == 0, "a random draw violated its own structure");
  g.require(bracket_bad == 0,
            fmt(double(bracket_bad)) + " brackets lost structure");

  res.metric("pairs", k.bracket_pairs);
  res.metric("input_violations", double(input_bad));
  res.metric("bracket_violations", double(bracket_bad));
  res.metric("max_bracket_terms", double(max_terms));
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 2
// Exhaustive quadruple scan: every momentum-balanced (i, j, k, l) within
// range with at least two components on the tangential pair and a
// non-diagonal index multiset has divisor i^2+j^2-k^2-l^2 equal to
// 2(j-k)(j-l) and at least |j|/5 in magnitude.
CriterionResult criterion_small_divisor_scan(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 2;
  res.name = criterion_name(2);
  Gate g;

  const int R = k.scan_range;
  const ModeLattice pair(k.n1, k.n2, R);
  long scanned = 0;
  long zero_div = 0;
  long identity_bad = 0;
  long bound_bad = 0;
  double min_ratio = 1e300;  // min over scanned of 5|divisor| / |j|
  for (int i = -R; i <= R; ++i) {
    if (i == 0) continue;
    for (int j = -R; j <= R; ++j) {
      if (j == 0) continue;
      for (int kk = -R; kk <= R; ++kk) {
        if (kk == 0) continue;
        const int l = i + j - kk;
        if (l == 0 || l < -R || l > R) continue;
        const QuadrupleClass cls = classify(i, j, kk, l, pair);
        if (cls.diagonal || cls.m_out > 2) continue;
        ++scanned;
        const long div = small_divisor(i, j, kk, l);
        const long factored = 2L * (long(j) - kk) * (long(j) - l);
        if (div == 0) ++zero_div;
        if (div != factored) ++identity_bad;
        if (5 * std::labs(div) < std::labs(long(j))) ++bound_bad;
        min_ratio =
            std::min(min_ratio, 5.0 * double(std::labs(div)) / std::abs(j));
      }
    }
  }
  g.require(scanned > 0, "empty scan");
  g.require(zero_div == 0, "a scanned quadruple had divisor zero");
  g.require(identity_bad == 0, "factored divisor identity violated");
  g.require(bound_bad == 0, "divisor lower bound |j|/5 violated");

  res.metric("quadruples_scanned", double(scanned));
  res.metric("zero_divisors", double(zero_div));
  res.metric("identity_violations", double(identity_bad));
  res.metric("bound_violations", double(bound_bad));
  res.metric("min_bound_ratio", min_ratio);
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 3
// The quartic normalization solves its defining identity coefficientwise:
// {Lambda, F} + G = G_bar + G_hat, with G_bar purely diagonal and the
// order-6 remainder structured with an empty degree-4 part.
CriterionResult criterion_normal_form_identity(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 3;
  res.name = criterion_name(3);
  Gate g;

  const ModeLattice lat(k.n1, k.n2, k.identity_j_max);
  const LatticeHamiltonian H = build_hamiltonian(lat, k.caps);
  const BirkhoffResult nf = normal_form_4(H);

  FTSeries lhs = poisson(nf.lambda, nf.F);
  lhs.add_scaled(H.quartic, 1.0);
  lhs.add_scaled(nf.g_bar, -1.0);
  lhs.add_scaled(nf.g_hat, -1.0);
  const double defect = lhs.coeff_sup();

  long offdiag = 0;
  for (const auto& [t, c] : nf.g_bar.terms()) {
    (void)c;
    if (t.k[0] != 0 || t.k[1] != 0 || t.l[0] != 0 || t.l[1] != 0 ||
        !t.diagonal_in_z())
      ++offdiag;
  }
  const long deg4 = static_cast<long>(nf.K.part_of_degree(4).size());
  const bool k_structured = nf.K.is_compact_form() && nf.K.is_gauge_invariant();

  g.require(defect <= 1e-13, "identity defect " + fmt(defect) + " > 1e-13");
  g.require(offdiag == 0, "diagonal part carries off-diagonal terms");
  g.require(k_structured, "remainder lost compactness or gauge invariance");
  g.require(deg4 == 0, "remainder keeps degree-4 terms");
  g.require(!nf.tail_warning, "flow expansion raised the tail warning");

  res.metric("lattice_half_width", k.identity_j_max);
  res.metric("identity_defect", defect);
  res.metric("g_bar_terms", double(nf.g_bar.size()));
  res.metric("g_bar_offdiagonal", double(offdiag));
  res.metric("remainder_terms", double(nf.K.size()));
  res.metric("remainder_degree4_terms", double(deg4));
  res.metric("remainder_structured", k_structured ? 1.0 : 0.0);
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 4
// On parameter points that survive the exclusion screen, the homological
// solve is exact to 1e-10 (verified independently through the generic
// bracket), the generator carries no angle-free and no site-diagonal
// content, and reflected site pairs sit inside the momentum cone.
CriterionResult criterion_homological_residual(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 4;
  res.name = criterion_name(4);
  Gate g;

  const ModeLattice lat(k.n1, k.n2, k.j_max);
  FrequencyMap fm;
  fm.lat = lat;
  fm.variant = FreqVariant::unreduced;
  fm.epsilon = k.residual_epsilon;
  DiophantineParams dp;
  dp.gamma = k.residual_gamma;
  dp.tau = k.dio_tau;
  dp.K_max = k.dio_k_max;
  dp.J_max = k.dio_j_cut;

  Rng rng(k.residual_seed);
  int accepted = 0;
  int rejected = 0;
  const int reject_cap = 10 * k.residual_points + 100;
  double max_residual = 0.0;
  double max_defect = 0.0;
  double min_ratio = 1e300;
  long structure_bad = 0;
  while (accepted < k.residual_points && rejected < reject_cap) {
    const std::array<double, 2> xi{rng.uniform(1e-3, 1.0),
                                   rng.uniform(1e-3, 1.0)};
    if (!diophantine_report(xi, fm, dp).violations.empty()) {
      ++rejected;
      continue;
    }
    ++accepted;

    const KamState st =
        kam_initial_state(lat, xi, k.residual_epsilon, k.caps);
    const auto [R, tail] = truncate_R(st.P);
    g.require(!R.empty(), "low-order block empty at the probe scale");
    if (R.empty()) break;
    const HomologicalSolution s =
        solve_homological(st.freq, R, dp.gamma, dp.tau, dp.delta,
                          0.5 * measured_site_floor(st.freq));
    max_residual = std::max(max_residual, s.residual);
    min_ratio = std::min(min_ratio, s.min_ratio);

    // Independent defect through the generic bracket: {F, N} + N_hat - R.
    FTSeries fn = poisson(st.freq.as_series(k.caps), s.F);
    fn.scale(-1.0);  // {F, N} = -{N, F}
    FTSeries rn = R;
    rn.scale(-1.0);
    max_defect = std::max(max_defect, add(add(fn, s.N_hat), rn).coeff_sup());

    for (const auto& [key, c] : s.F.terms()) {
      (void)c;
      if (key.k_l1() == 0 || key.diagonal_in_z()) ++structure_bad;
      int net_i = 0, net_j = 0, sites = 0;
      for (int j : lat.normal_modes()) {
        const int net = key.alpha(j) - key.beta(j);
        if (net != 0) {
          ++sites;
          (sites == 1 ? net_i : net_j) = j;
        }
      }
      if (sites == 2 && net_i == -net_j &&
          std::abs(net_i) > 2.5 * key.k_l1())
        ++structure_bad;
    }
    for (const auto& [key, c] : s.N_hat.terms())
      if (key.k_l1() != 0 || !key.diagonal_in_z() || c.imag() != 0.0)
        ++structure_bad;
  }
  g.require(accepted == k.residual_points,
            "screen accepted only " + fmt(double(accepted)) + " points");
  g.require(max_residual <= 1e-10,
            "solver residual " + fmt(max_residual) + " > 1e-10");
  g.require(max_defect <= 1e-10,
            "bracket defect " + fmt(max_defect) + " > 1e-10");
  g.require(structure_bad == 0, "generator structure violated");

  res.metric("points", double(accepted));
  res.metric("rejected", double(rejected));
  res.metric("max_residual", max_residual);
  res.metric("max_bracket_defect", max_defect);
  res.metric("structure_violations", double(structure_bad));
  res.metric("min_divisor_ratio", accepted > 0 ? min_ratio : 0.0);
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 5
// The iteration contracts on schedule: the measured field norm decreases
// strictly, the 4/3-power ratio stays within a factor 2 of constant, and
// the angle-domain width halves its way down to s0/2.
CriterionResult criterion_kam_contraction(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 5;
  res.name = criterion_name(5);
  Gate g;

  const ModeLattice lat(k.n1, k.n2, k.j_max);
  const KamState st =
      kam_initial_state(lat, k.kam_xi_ref, k.kam_epsilon, k.caps);
  const KamParams kp;
  const KamRun run = iterate(st, kp, k.kam_steps);

  g.require(!run.excluded, "a resonance excluded the parameter point");
  g.require(static_cast<int>(run.steps.size()) == k.kam_steps,
            "iteration stopped early");

  double ratio_lo = 1e300, ratio_hi = 0.0;
  double max_residual = 0.0;
  const double s_half = kp.s0 / 2.0;
  bool s_on_schedule = true;
  for (std::size_t v = 0; v < run.steps.size(); ++v) {
    const KamStepReport& rep = run.steps[v];
    g.require(rep.eps_next < rep.eps_measured,
              "field norm failed to decrease at step " + fmt(double(v)));
    if (v + 1 < run.steps.size())
      g.require(run.steps[v + 1].eps_measured == rep.eps_next,
                "step chaining broke");
    const double ratio =
        rep.eps_next / std::pow(rep.eps_measured, 4.0 / 3.0);
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
    max_residual = std::max(max_residual, rep.residual);
    // Gap to s0/2 halves every step: s_nu = s0/2 + s0 2^{-nu-1}.
    const double want_gap = kp.s0 * std::pow(2.0, -double(v) - 1.0);
    if (std::abs((rep.s - s_half) - want_gap) > 1e-9 * kp.s0)
      s_on_schedule = false;
    res.metric("eps_" + std::to_string(v), rep.eps_measured);
  }
  if (!run.steps.empty()) {
    res.metric("eps_" + std::to_string(run.steps.size()),
               run.steps.back().eps_next);
    g.require(ratio_hi / ratio_lo <= 2.0,
              "contraction ratio spread " + fmt(ratio_hi / ratio_lo) +
                  " > 2");
    g.require(s_on_schedule, "angle-domain width left its halving schedule");
    res.metric("ratio_spread", ratio_hi / ratio_lo);
    res.metric("s_last", run.steps.back().s);
    res.metric("s_target", s_half);
  } else {
    res.note = "no iteration steps requested";
  }
  res.metric("steps", double(run.steps.size()));
  res.metric("max_residual", max_residual);
  res.metric("excluded", run.excluded ? 1.0 : 0.0);
  res.pass = g.ok;
  if (!g.note.empty()) res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 6
// The excluded parameter measure grows linearly in the exclusion strength:
// a through-origin line explains the Monte-Carlo estimates with R^2 at
// least 0.95.
CriterionResult criterion_measure_law(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 6;
  res.name = criterion_name(6);
  Gate g;

  FrequencyMap fm;
  fm.lat = ModeLattice(k.n1, k.n2, k.j_max);
  fm.variant = FreqVariant::displayed;
  fm.c = k.measure_c;
  fm.epsilon = k.measure_epsilon;
  DiophantineParams dp;
  dp.tau = k.dio_tau;
  dp.K_max = k.dio_k_max;
  dp.J_max = k.dio_j_cut;
  const ParamBox box;

  const std::vector<MeasureEstimate> scan = measure_scan(
      box, fm, dp, k.measure_gammas, k.measure_samples, k.measure_seed);

  std::vector<double> xs, ys;
  bool monotone = true;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    xs.push_back(scan[i].gamma);
    ys.push_back(scan[i].estimate);
    if (i > 0 && scan[i].estimate <= scan[i - 1].estimate) monotone = false;
    const std::string tag = std::to_string(i);
    res.metric("gamma_" + tag, scan[i].gamma);
    res.metric("estimate_" + tag, scan[i].estimate);
    res.metric("ci_" + tag, scan[i].ci);
  }
  g.require(scan.size() >= 2, "need at least two strengths to fit");
  const LineFit fit = fit_through_origin(xs, ys);
  g.require(fit.slope > 0.0, "excluded measure failed to grow");
  g.require(fit.r2 >= 0.95,
            "through-origin fit R^2 " + fmt(fit.r2) + " < 0.95");

  res.metric("samples_per_gamma", double(k.measure_samples));
  res.metric("slope", fit.slope);
  res.metric("r2", fit.r2);
  res.metric("monotone", monotone ? 1.0 : 0.0);
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 7
// A single-mode orbit rotates at the exact dispersion frequency: the
// extracted tone matches both the direct substitution into the equation of
// motion and the closed-form frequency map, with conserved mass.
CriterionResult criterion_plane_wave_dispersion(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 7;
  res.name = criterion_name(7);
  Gate g;

  const double amp = std::sqrt(k.pw_amp2);
  const SpectralField u0 = plane_wave(k.n1, amp, k.pw_grid);
  IntegrateOptions opt;
  opt.watch = {k.n1};
  opt.sample_stride = k.pw_stride;
  const Trajectory tr = integrate(u0, k.pw_dt, k.pw_T, opt);
  const ModeFrequency f = extract_frequencies(tr, {k.n1})[0];

  const double omega_pde = plane_wave_frequency(k.n1, amp);
  FrequencyMap fm;
  fm.lat = ModeLattice(k.n1, k.n2, k.j_max);
  fm.variant = FreqVariant::unreduced;
  const double omega_map = fm.omega(0, {2.0 * kPi * k.pw_amp2, 0.0});

  const double err_pde = std::abs(std::abs(f.omega) - omega_pde);
  const double err_map = std::abs(std::abs(f.omega) - omega_map);
  g.require(f.dominant, "no dominant tone in the watched mode");
  g.require(err_pde <= 1e-5,
            "extracted frequency off the substitution value by " +
                fmt(err_pde));
  g.require(err_map <= 1e-5,
            "extracted frequency off the map value by " + fmt(err_map));
  g.require(std::abs(omega_pde - omega_map) <= 1e-12,
            "substitution and map disagree");
  g.require(tr.mass_drift() <= 1e-8,
            "mass drift " + fmt(tr.mass_drift()) + " > 1e-8");

  res.metric("omega_extracted", f.omega);
  res.metric("omega_substitution", omega_pde);
  res.metric("omega_map", omega_map);
  res.metric("err_vs_substitution", err_pde);
  res.metric("err_vs_map", err_map);
  res.metric("leakage", f.leakage);
  res.metric("mass_drift", tr.mass_drift());
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 8
// Two-mode cross-validation: integrating corrected torus data at three
// parameter sizes, the gap between each extracted mode frequency and its
// first-order prediction shrinks quadratically (log-log slope 2.0 +- 0.3).
CriterionResult criterion_two_frequency_xval(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 8;
  res.name = criterion_name(8);
  Gate g;

  const ModeLattice lat(k.n1, k.n2, k.xval_j_max);
  FrequencyMap fm;
  fm.lat = lat;
  fm.variant = FreqVariant::unreduced;

  std::vector<double> ls, le1, le2;
  double max_drift = 0.0;
  for (std::size_t i = 0; i < k.xval_s.size(); ++i) {
    const double s = k.xval_s[i];
    const SpectralField u0 = build_initial_data(lat, {s, s}, 1, k.xval_grid);
    IntegrateOptions opt;
    opt.watch = {k.n1, k.n2};
    opt.sample_stride = k.xval_stride;
    const Trajectory tr = integrate(u0, k.xval_dt, k.xval_T, opt);
    max_drift = std::max(max_drift, tr.mass_drift());
    const auto fr = extract_frequencies(tr, {k.n1, k.n2});
    g.require(fr[0].dominant && fr[1].dominant,
              "no dominant tone at parameter size " + fmt(s));
    const double e1 = std::abs(fr[0].omega - fm.omega(0, {s, s}));
    const double e2 = std::abs(fr[1].omega - fm.omega(1, {s, s}));
    g.require(e1 > 0.0 && e2 > 0.0, "zero defect cannot be regressed");
    const std::string tag = std::to_string(i);
    res.metric("s_" + tag, s);
    res.metric("err1_" + tag, e1);
    res.metric("err2_" + tag, e2);
    if (e1 > 0.0 && e2 > 0.0) {
      ls.push_back(std::log(s));
      le1.push_back(std::log(e1));
      le2.push_back(std::log(e2));
    }
  }
  g.require(ls.size() == k.xval_s.size() && ls.size() >= 2,
            "not enough usable runs for the regression");
  if (ls.size() >= 2) {
    const LineFit f1 = fit_line(ls, le1);
    const LineFit f2 = fit_line(ls, le2);
    g.require(f1.slope >= 1.7 && f1.slope <= 2.3,
              "first-mode exponent " + fmt(f1.slope) + " outside 2.0+-0.3");
    g.require(f2.slope >= 1.7 && f2.slope <= 2.3,
              "second-mode exponent " + fmt(f2.slope) + " outside 2.0+-0.3");
    res.metric("slope_mode1", f1.slope);
    res.metric("slope_mode2", f2.slope);
    res.metric("r2_mode1", f1.r2);
    res.metric("r2_mode2", f2.r2);
  }
  res.metric("max_mass_drift", max_drift);
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// --------------------------------------------------------------------- 9
// Long-horizon localization: corrected two-mode data keeps all but 1e-4 of
// the mass integral on the excited pair, with the integral itself
// conserved to 1e-8.
CriterionResult criterion_stability_proxy(const AcceptanceKnobs& k) {
  const auto t0 = Clock::now();
  CriterionResult res;
  res.id = 9;
  res.name = criterion_name(9);
  Gate g;

  const ModeLattice lat(k.n1, k.n2, k.stab_j_max);
  const SpectralField u0 = build_initial_data(lat, k.stab_xi, 1, k.stab_grid);
  IntegrateOptions opt;
  opt.watch = {k.n1, k.n2};
  opt.sample_stride = k.stab_stride;
  const Trajectory tr = integrate(u0, k.stab_dt, k.stab_T, opt);

  const double frac = non_excited_fraction(tr, {k.n1, k.n2});
  g.require(frac <= 1e-4,
            "non-excited fraction " + fmt(frac) + " > 1e-4");
  g.require(tr.mass_drift() <= 1e-8,
            "mass drift " + fmt(tr.mass_drift()) + " > 1e-8");

  res.metric("non_excited_fraction", frac);
  res.metric("mass_drift", tr.mass_drift());
  res.metric("samples", double(tr.t.size()));
  res.metric("horizon", k.stab_T);
  res.pass = g.ok;
  res.note = g.note;
  res.elapsed_seconds = seconds_since(t0);
  return res;
}

// ------------------------------------------------------------- dispatch
std::string criterion_name(int id) {
  switch (id) {
    case 1: return "bracket_structure";
    case 2: return "small_divisor_scan";
    case 3: return "normal_form_identity";
    case 4: return "homological_residual";
    case 5: return "kam_contraction";
    case 6: return "measure_law";
    case 7: return "plane_wave_dispersion";
    case 8: return "two_frequency_xval";
    case 9: return "stability_proxy";
    default:
      throw std::runtime_error("unknown criterion id " + std::to_string(id));
  }
}

CriterionResult run_criterion(int id, const AcceptanceKnobs& k) {
  switch (id) {
    case 1: return criterion_bracket_structure(k);
    case 2: return criterion_small_divisor_scan(k);
    case 3: return criterion_normal_form_identity(k);
    case 4: return criterion_homological_residual(k);
    case 5: return criterion_kam_contraction(k);
    case 6: return criterion_measure_law(k);
    case 7: return criterion_plane_wave_dispersion(k);
    case 8: return criterion_two_frequency_xval(k);
    case 9: return criterion_stability_proxy(k);
    default:
      throw std::runtime_error("unknown criterion id " + std::to_string(id));
  }
}

std::string verdict_line(const CriterionResult& r) {
  std::string line = "[criterion " + std::to_string(r.id) + "] " + r.name;
  line += " ... ";
  line += r.pass ? "PASS" : "FAIL";
  return line;
}

}  // namespace dnls
