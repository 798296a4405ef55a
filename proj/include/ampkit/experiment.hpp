#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ampkit/model.hpp"
#include "ampkit/solvers.hpp"

namespace ampkit {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverEntry {
  SolverConfig cfg;
  // Optional MAMP damping keyed by the matrix condition number, for sweeps
  // that follow the paper's per-kappa damping choices.
  std::map<double, std::pair<double, double>> damping_by_kappa;
};

struct ExperimentConfig {
  std::string name;
  std::vector<MatrixSpec> matrices;  // one or more (alpha/kappa sweep)
  PriorSpec prior;
  std::vector<double> snr_db;
  std::vector<SolverEntry> solvers;
  int trials = 1;
  std::uint64_t master_seed = 0;
  bool emit_trace = false;
  bool emit_se = false;
  bool emit_diag = false;
  int gaussianity_iteration = 0;  // 0 disables the input-error KS report
  int se_mc_samples = 100000;     // MAMP SE Monte-Carlo draws
  bool linear_average = false;    // default: average per-trial NMSE in dB
  // "per_complex_symbol" halves the per-real-dimension noise variance so a
  // nominal SNR matches the complex system a real QPSK reduction came from.
  bool complex_symbol_snr = false;
};

// Parses the JSON document; throws ConfigError with a field/position message.
ExperimentConfig parse_config(const std::string& json_text);

// Reports every constraint violation without running anything.
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

struct RunOptions {
  std::string out_dir = ".";
  std::optional<int> trials_override;
  std::optional<std::uint64_t> seed_override;
  bool linear_average = false;  // OR-ed with the config flag
};

struct RunResult {
  std::vector<std::string> files_written;
};

// Runs every (matrix, snr) group for `trials` seeded trials, averages the
// per-iteration NMSE curves across trials, computes SE curves once per group,
// and writes <name>_trace.csv / <name>_se.csv / <name>_diag.json atomically.
// Diverged solvers are recorded (empty CSV cells from the divergence point),
// never fatal.
RunResult run_experiment(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace ampkit
