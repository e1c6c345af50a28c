// Experiment orchestration: a single JSON configuration drives the staged
// pipeline (model -> normalization -> frequencies -> exclusion measure ->
// iteration -> simulation -> checks), every stage writes its inputs and
// outputs under the configured directory, and the machine-readable summary
// carries each check's metrics with a pass/fail verdict.  Reruns with the
// same seed produce byte-identical summaries.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dnls/metrics.hpp"
#include "dnls/serialize.hpp"

namespace dnls {

struct SimConfig {
  int grid = 128;
  double dt = 2.5e-4;
  double t_final = 200.0;
  int stride = 400;
  std::vector<int> watch{1, 5};
  std::array<double, 2> xi{1e-3, 1e-3};  // torus data for the sim stage
  int order = 1;                         // initial-data correction order
};

struct ExperimentConfig {
  std::array<int, 2> pair{1, 5};  // tangential modes: n1 odd, |n2 - n1| = 4
  int j_max = 8;
  int degree_cap = 6;
  int fourier_cap = 8;
  double epsilon = 1e-3;

  // Parameter box, Monte-Carlo density, iteration base point.
  std::array<double, 2> xi_lo{1e-3, 1e-3};
  std::array<double, 2> xi_hi{1.0, 1.0};
  int measure_samples = 10000;
  std::array<double, 2> xi_ref{0.37, 0.59};

  // Exclusion parameters.
  double gamma = 1e-4;
  double tau = 5.0;
  int k_max = 20;
  int j_cut = 60;

  // Iteration schedule and its norm-evaluation grid.
  int nu_max = 4;
  int angle_samples = 32;
  int radial_samples = 8;

  SimConfig sim;

  std::uint64_t seed = 0;  // mandatory; parsing rejects a missing seed
  std::string output_dir = "out";

  // Rejects invalid pairs ("n1 is odd and |n2 - n1| = 4"), tau < 5,
  // non-positive caps/grids, and an empty parameter box.
  void validate() const;
};

// Strict parse: unknown keys are rejected, `seed` is required, everything
// else falls back to the documented default.  `config_to_json` writes the
// fully resolved document (all defaults filled in).
ExperimentConfig config_from_json(const json& doc);
json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

// The checks of metrics.hpp evaluated at this configuration's scale.
AcceptanceKnobs knobs_from_config(const ExperimentConfig& c);

struct StageError {
  std::string stage;
  std::string message;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<CriterionResult> criteria;
  std::vector<StageError> errors;
  json summary;  // the document written to <output_dir>/summary.json

  bool checks_pass() const;  // every criterion ran and passed
  bool clean() const { return errors.empty(); }
};

// Individual stages; each writes its artifacts under <output_dir>/<stage>/
// and returns the stage's summary fragment.  Stages recompute what they
// need from the configuration, so any one of them runs in isolation.
json stage_model(const ExperimentConfig& c);
json stage_normal_form(const ExperimentConfig& c);
json stage_frequencies(const ExperimentConfig& c);
json stage_measure(const ExperimentConfig& c, double c_mass);
json stage_kam(const ExperimentConfig& c);
json stage_sim(const ExperimentConfig& c);

// Full pipeline: all stages, then every check at configuration scale.
// Module errors are caught per stage, recorded with the stage name, and
// leave the remaining stages running; partial results stay on disk.
ExperimentReport run_pipeline(const ExperimentConfig& c);

// Compare a summary against <goldens_dir>/summary.json using the tolerance
// manifest <goldens_dir>/tolerances.json.  A missing golden is reported as
// a skip (ok stays true, `skipped` set); structural differences fail.
struct GoldenCheck {
  bool ok = true;
  bool skipped = false;
  std::vector<std::string> lines;
};
GoldenCheck golden_check(const json& summary, const std::string& goldens_dir);

}  // namespace dnls
