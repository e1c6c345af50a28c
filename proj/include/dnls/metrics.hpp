// The workbench's nine go/no-go checks: structural properties of the
// bracket algebra, the quartic normalization, the homological solver, the
// iteration schedule, the exclusion-measure law, and three quantitative
// comparisons between predicted torus frequencies and the integrated PDE.
//
// Each check returns a structured result (named metrics plus one verdict)
// so the acceptance runner and the pipeline report share one
// implementation.  The knob defaults are the full-scale parameters the
// shipped suite runs at; the pipeline substitutes configuration-derived
// values so a reduced-scale run exercises the same code paths.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dnls/series.hpp"

namespace dnls {

struct CriterionResult {
  int id = 0;
  std::string name;     // matches the registered test name
  bool pass = false;
  double elapsed_seconds = 0.0;
  // Ordered (key, value) pairs; every number that feeds the verdict.
  std::vector<std::pair<std::string, double>> metrics;
  std::string note;     // one-line diagnostic, empty when clean

  void metric(const std::string& key, double value) {
    metrics.emplace_back(key, value);
  }
  double metric_value(const std::string& key) const;
};

// Parameters for one full evaluation; defaults are the shipped scale.
struct AcceptanceKnobs {
  // Lattice shared by the algebra / solver / iteration checks.
  int n1 = 1;
  int n2 = 5;
  int j_max = 8;
  SeriesCaps caps{};

  // 1: bracket closure on random structured series.
  int bracket_pairs = 200;
  int bracket_terms = 15;
  std::uint64_t bracket_seed = 20260818;

  // 2: exhaustive divisor scan over momentum-balanced quadruples.
  int scan_range = 50;

  // 3: quartic normalization identity (its own, wider lattice).
  int identity_j_max = 12;

  // Exclusion parameters shared by the screened-residual and measure checks.
  double dio_tau = 5.0;
  int dio_k_max = 20;
  int dio_j_cut = 60;

  // 4: homological residuals on screened parameter points.
  int residual_points = 20;
  double residual_epsilon = 0.3;
  double residual_gamma = 1e-4;
  std::uint64_t residual_seed = 4242;

  // 5: iteration contraction.
  int kam_steps = 4;
  double kam_epsilon = 1e-3;
  std::array<double, 2> kam_xi_ref{0.37, 0.59};

  // 6: excluded-measure growth law.
  std::vector<double> measure_gammas{1e-4, 2e-4, 4e-4, 8e-4};
  int measure_samples = 10000;
  std::uint64_t measure_seed = 20250818;
  double measure_c = 0.18;
  double measure_epsilon = 1e-3;

  // 7: single-mode dispersion cross-check.
  int pw_grid = 256;
  double pw_dt = 5e-3;
  double pw_T = 200.0;
  int pw_stride = 50;
  double pw_amp2 = 0.01;

  // 8: two-mode frequency cross-validation over a parameter ladder.
  std::vector<double> xval_s{2.5e-4, 5e-4, 1e-3};
  int xval_j_max = 16;
  int xval_grid = 128;
  double xval_dt = 2.5e-4;
  double xval_T = 200.0;
  int xval_stride = 400;

  // 9: energy localization over a long horizon.
  std::array<double, 2> stab_xi{1e-3, 1e-3};
  int stab_j_max = 16;
  int stab_grid = 128;
  double stab_dt = 5e-4;
  double stab_T = 500.0;
  int stab_stride = 400;
};

CriterionResult criterion_bracket_structure(const AcceptanceKnobs& k = {});
CriterionResult criterion_small_divisor_scan(const AcceptanceKnobs& k = {});
CriterionResult criterion_normal_form_identity(const AcceptanceKnobs& k = {});
CriterionResult criterion_homological_residual(const AcceptanceKnobs& k = {});
CriterionResult criterion_kam_contraction(const AcceptanceKnobs& k = {});
CriterionResult criterion_measure_law(const AcceptanceKnobs& k = {});
CriterionResult criterion_plane_wave_dispersion(const AcceptanceKnobs& k = {});
CriterionResult criterion_two_frequency_xval(const AcceptanceKnobs& k = {});
CriterionResult criterion_stability_proxy(const AcceptanceKnobs& k = {});

inline constexpr int kCriterionCount = 9;

// Registered name of criterion `id` (1-based), e.g. "bracket_structure".
std::string criterion_name(int id);

// Dispatch by 1-based id; throws on an unknown id.
CriterionResult run_criterion(int id, const AcceptanceKnobs& k = {});

// One-line rendering: "[criterion N] <name> ... PASS/FAIL".
std::string verdict_line(const CriterionResult& r);

}  // namespace dnls
