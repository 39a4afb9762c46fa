#pragma once

// End-to-end reference experiments: a rank-3 projection ensemble on five
// modes and a five-mode pairing ensemble with three occupied quasimodes.
// Both compile a preparation circuit, simulate it exactly, sample
// measurement outcomes, and compare against the closed-form distribution.

#include "fdpp/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdpp {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  Index shots = 20000;
  double noise = 0.0;
  bool exact = false;           // compare amplitudes instead of sampling
  std::string scheduler = "sk"; // sk | logdepth
  std::string out_dir;          // when nonempty, CSV artifacts are written
};

struct ExperimentResult {
  Index n_modes = 0;
  Index rank = 0;
  double tv = 0;        // sampled (or exact) distance to the closed form
  double tv_null = 0;   // distance of a direct resample from the closed form
  bool parity_uniform = true;   // pairing runs: all samples share one parity
  int parity_observed = 1;
  int parity_predicted = 1;
  Eigen::VectorXd exact_pmf;
  Eigen::VectorXd empirical;
  std::vector<std::uint64_t> samples;
  std::string summary;  // printable report
};

ExperimentResult run_experiment_projection(const ExperimentConfig& cfg);
ExperimentResult run_experiment_pfpp(const ExperimentConfig& cfg);

// Write exact_pmf.csv, empirical.csv, and summary.txt under dir. Output is
// byte-stable for a fixed configuration.
void emit_plots_data(const ExperimentResult& result, const std::string& dir);

}  // namespace fdpp
