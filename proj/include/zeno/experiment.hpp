#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeno/simulator.hpp"

namespace zeno {

// Invalid or unparsable configuration; the CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runtime or I/O failure; the CLI maps this to exit code 2.
class RunError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A run request: one simulation setup plus sweep lists over the aggregation
// rule, q, b, n_r and rho. Defaults follow the reference grid (gamma 0.1,
// rho 0.0005, n_r 4, worker batch 100, m 20, 10 repeats, 25-iteration
// epochs).
struct ExperimentConfig {
  TaskKind task = TaskKind::quadratic;
  int dimension = 10;
  int num_points = 2000;
  int m = 20;
  int worker_batch = 100;
  double gamma = 0.1;
  LrSchedule schedule = LrSchedule::constant;
  std::optional<double> beta;
  long iterations = 100;
  FaultKind fault_kind = FaultKind::none;
  FaultSelection selection = FaultSelection::fixed;
  double magnitude = -10.0;
  DataMode data_mode = DataMode::iid;
  std::uint64_t seed = 42;
  TaskOptions task_options;
  std::optional<std::vector<double>> x0;

  int repeats = 10;
  int epoch_length = 25;
  std::string output_dir;

  std::vector<AggRule> aggregators{AggRule::zeno};
  std::vector<int> q_list{0};
  std::vector<int> b_list{4};
  std::vector<int> nr_list{4};
  std::vector<double> rho_list{0.0005};

  // Timing subcommand only.
  std::vector<int> m_sweep;
  int timing_iters = 100;

  struct Combination {
    AggRule rule;
    int q;
    int b;
    int nr;
    double rho;
  };

  // Cartesian product in aggregator-major order (then q, b, n_r, rho).
  std::vector<Combination> combinations() const;
  SimConfig to_sim_config(const Combination& c, int repeat) const;

  // Validates every swept combination; throws ConfigError naming the
  // offending field or constraint.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& json_text);

struct RunOptions {
  std::string out_dir;  // overrides config.output_dir when non-empty
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Precedence: --out, config output_dir, $ZENO_OUT_DIR, "zeno_out".
std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const RunOptions& opts);

std::string trace_filename(const ExperimentConfig::Combination& c, int repeat);

// Runs every (combination, repeat), writing one trace CSV each plus
// summary.csv with per-epoch means across repeats.
void run_suite(const ExperimentConfig& cfg, const RunOptions& opts);

// Measures per-rule aggregation wall-clock over the m sweep and writes
// timing.csv (columns rule, m, d, n_r, iters, median_ns).
void emit_timing(const ExperimentConfig& cfg, const RunOptions& opts);

// Shortest representation with 17 significant digits; round-trips exactly.
std::string format_double(double v);

}  // namespace zeno
