// One iteration layer of the quadratic scheme: truncate the perturbation,
// solve the homological equation against the diagonal normal form with
// exact split-divisor arithmetic, push the Hamiltonian through the
// truncated Lie flow of the generator, and drive the domain/smallness
// schedule.  Divisors are gated by the same condition families as the
// exclusion module; hitting a small one raises a resonance error that marks
// the parameter point excluded rather than failing numerically.
#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnls/diophantine.hpp"
#include "dnls/frequency.hpp"
#include "dnls/series.hpp"

namespace dnls {

// ------------------------------------------------------------ frequencies
// The diagonal normal form N = <omega, I> + sum Omega_j z_j zbar_j, stored
// as split values so the eps^{-4} parts cancel exactly inside divisors.
// Site slots follow ModeLattice::dense_index; tangential slots are unused.
struct StepFrequencies {
  ModeLattice lat;
  double epsilon = 1.0;
  std::array<SplitVal, 2> omega;
  std::vector<SplitVal> Omega;

  double inv_eps4() const;
  // Divisor <k, omega> + sum_j (alpha_j - beta_j) Omega_j of one monomial.
  SplitVal divisor(const TermKey& t) const;
  // The normal form as a series (for display/serialization; coefficients
  // collapse the split parts into doubles).
  FTSeries as_series(const SeriesCaps& caps) const;
};

// Closed-form frequencies at a parameter point (the variant and scaling are
// taken from the map).
StepFrequencies step_frequencies(const FrequencyMap& fm,
                                 const std::array<double, 2>& xi);

// {N, M} for the diagonal normal form: i * divisor * M termwise, evaluated
// in split arithmetic (never through the generic bracket, whose eps^{-4}
// coefficient scale would shred the O(1) parts).
FTSeries diagonal_bracket(const StepFrequencies& freq, const FTSeries& M);

// ------------------------------------------------------------- resonance
// A divisor fell below its exclusion floor: the parameter point must be
// excluded at this step.  Not a numerical failure.
class ResonanceError : public std::runtime_error {
 public:
  ResonanceError(const std::string& what, std::array<int, 2> k_,
                 std::vector<std::pair<int, int>> l_, double divisor_,
                 double floor_)
      : std::runtime_error(what),
        k(k_),
        l(std::move(l_)),
        divisor(divisor_),
        floor(floor_) {}
  std::array<int, 2> k;
  std::vector<std::pair<int, int>> l;
  double divisor = 0.0;
  double floor = 0.0;
};

// --------------------------------------------------------------- the step
struct KamParams {
  double s0 = 0.4;         // initial angle-domain width
  double r0 = 1.0;         // initial radial-domain size
  double tau = 5.0;
  double delta = 1.0;
  double eta0 = 0.4;       // working domain-shrink normalizer (see notes)
  int lie_order = 3;       // Lie-series truncation of the flow
  double residual_tol = 1e-10;
  bool strict_gates = false;  // throw when the literal smallness gate fails

  // Vector-field norm proxy: a fixed grid over the domain D(s, r).
  double norm_a = 0.1;
  double norm_p = 2.0;     // site-weight exponent of the state profile
  double norm_q = 1.0;     // site-weight exponent of the field norm
  int angle_samples = 32;
  int radial_samples = 8;
  std::uint64_t profile_seed = 77;
};

struct KamState {
  StepFrequencies freq;
  FTSeries P;
  int nu = 0;
};

// ||X_P|| on the sample grid of D(s, r): |dP/dI|_sup + |dP/dtheta|_sup/r^2
// + (||dP/dzbar||_{a,q} + ||dP/dz||_{a,q})/r.
double vector_field_norm(const FTSeries& P, double r, const KamParams& kp);

// R = terms with 2|l| + |alpha| + |beta| <= 2; tail = P - R (constants ride
// in the tail and are dropped from the assembled next perturbation).
std::pair<FTSeries, FTSeries> truncate_R(const FTSeries& P);

struct HomologicalSolution {
  FTSeries F;
  FTSeries N_hat;
  double residual = 0.0;     // ||{F, N} + N_hat - R|| coefficient sup
  double min_ratio = 0.0;    // min |divisor| / floor over solved terms
  int solved_terms = 0;
  int diagonal_terms = 0;
};

// Coefficientwise solve of {F, N} + N_hat = R.  gamma scales the divisor
// floors (the same family right-hand sides as the exclusion module); m_bound
// is the site-combination floor used for angle-free divisors, which cannot
// occur for momentum-conserving gauge-invariant input and are asserted so.
HomologicalSolution solve_homological(const StepFrequencies& freq,
                                      const FTSeries& R, double gamma,
                                      double tau, double delta,
                                      double m_bound);

struct KamStepReport {
  int nu = 0;
  double s = 0.0, r = 0.0, sigma = 0.0, gamma = 0.0;
  double eps_measured = 0.0;         // ||X_P|| entering the step
  double eps_next = 0.0;             // ||X_P+|| on the shrunk domain
  double eta = 0.0;                  // working shrink factor applied
  double eta_literal = 0.0;          // (eps/(gamma sigma^{2tau+3}))^{1/3}
  double residual = 0.0;
  double min_ratio = 0.0;
  double measured_m = 0.0;           // site-combination ratio floor of freq
  double m_floor = 0.0;              // scheduled lower bound for measured_m
  std::array<double, 2> omega{{0.0, 0.0}};
  bool excluded = false;
  bool smallness_ok = true;          // literal Lie-domain gate (report only)
  double smallness_lhs = 0.0, smallness_rhs = 0.0;
  std::uint64_t truncation_drops = 0;
};

// One step at schedule position (s, r, sigma, gamma).  On resonance the
// error propagates to the caller; iterate() converts it into an excluded
// step report.
KamState kam_step(const KamState& state, double s, double r, double sigma,
                  double gamma, const KamParams& kp, KamStepReport* report);

struct KamRun {
  std::vector<KamStepReport> steps;
  std::vector<std::array<double, 2>> omega_path;  // omega after each step
  double C_cal = 0.0;       // contraction constant from the first step
  bool excluded = false;    // a resonance stopped the iteration
  // eps_schedule[nu] = C_cal (gamma_nu sigma_nu^{2tau+3})^{-1/3} eps_nu^{4/3}
  // predicting eps_{nu+1}; literal variant uses the unit constant.
  std::vector<double> eps_schedule;
  std::vector<double> eps_schedule_literal;
};

// Runs nu = 0..nu_max-1 steps of the schedule: sigma_nu = s0/8 * 2^{-nu},
// s_{nu+1} = s_nu - 2 sigma_nu (decreasing to s0/2), gamma_nu =
// eps_nu^{1/3}, r_{nu+1} = eta_nu r_nu.  eps_nu is the measured field norm;
// the working eta_nu = eta0 (eps_nu/eps_0)^{1/3} keeps the literal
// schedule's 4/3-contraction shape with a desk-scale normalizer.
KamRun iterate(KamState state, const KamParams& kp, int nu_max);

// Initial (N, P) for the lattice Hamiltonian: order-4 normal form, polar
// substitution at eps^4 * xi_ref, rescale by eps, then split off the
// diagonal frequencies (taken in closed form, which the transformed
// diagonal part reproduces).  Low-order diagonal corrections from the
// order->=6 remainder are genuine perturbation content: they stay in P and
// are absorbed by the first step's normal-form update.
KamState kam_initial_state(const ModeLattice& lat,
                           const std::array<double, 2>& xi_ref, double eps,
                           const SeriesCaps& caps, int taylor_order = 3);

// Minimum of |<(alpha-beta), Omega>| / l_bracket_unsigned over short site
// combinations (|l| <= 2) within the lattice, the per-step twist floor.
double measured_site_floor(const StepFrequencies& freq);

}  // namespace dnls
