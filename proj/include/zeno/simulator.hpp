#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "zeno/aggregation.hpp"
#include "zeno/dataset.hpp"
#include "zeno/faults.hpp"
#include "zeno/param_vector.hpp"
#include "zeno/rng.hpp"
#include "zeno/task.hpp"

namespace zeno {

enum class LrSchedule { constant, inv_sqrt_T };
enum class DataMode { iid, disjoint };

LrSchedule lr_schedule_from_string(const std::string& name);
std::string to_string(LrSchedule s);
DataMode data_mode_from_string(const std::string& name);
std::string to_string(DataMode m);

struct SimConfig {
  TaskKind task = TaskKind::quadratic;
  int dimension = 10;
  int num_points = 2000;
  int m = 20;            // workers
  int worker_batch = 100;  // n
  int zeno_batch = 4;      // n_r
  double gamma = 0.1;
  LrSchedule schedule = LrSchedule::constant;
  long iterations = 100;  // T
  AggregatorConfig aggregator{AggRule::zeno, 4};
  double rho = 0.0005;
  std::optional<double> beta;  // when set, rho = beta * gamma^2 / 2
  FaultSpec fault;
  DataMode data_mode = DataMode::iid;
  std::uint64_t seed = 42;
  TaskOptions task_options;
  // Optional initializer override; by default x0 is drawn uniformly from
  // [-0.5, 0.5] per coordinate on the init stream.
  std::optional<std::vector<double>> x0;

  // Throws std::invalid_argument on any constraint violation.
  void validate() const;
};

struct MetricsRecord {
  long t = 0;
  double train_loss = 0.0;
  double true_grad_norm = 0.0;
  std::optional<double> test_accuracy;  // classification tasks only
  std::vector<int> selected;            // zeno/krum choices, empty otherwise
  std::int64_t wallclock_ns = 0;        // aggregation call only
  bool diverged = false;
};

struct Trace {
  SimConfig config;
  double initial_loss = 0.0;
  double initial_grad_norm = 0.0;
  std::optional<double> initial_accuracy;
  std::vector<MetricsRecord> records;  // one per iteration, post-update
  ParamVector final_x;
};

struct WorkerState {
  int id = 0;
  const Dataset* data = nullptr;  // shard in disjoint mode, global otherwise
  bool faulty_this_iter = false;
};

// Full-dataset loss, plus top-1 accuracy for classification tasks (argmax
// with lowest-index tie breaking).
struct EvalResult {
  double loss = 0.0;
  std::optional<double> accuracy;
};
EvalResult evaluate(const TaskSpec& task, const ParamVector& x,
                    const Dataset& dataset);

// Samples the worker's batch and returns the gradient estimate. A worker
// flagged faulty under label_flip honestly computes the gradient of its
// poisoned batch; other fault kinds act at the gradient level on the server.
ParamVector worker_step(const WorkerState& w, const ParamVector& x,
                        const SimConfig& cfg, const TaskSpec& task, Rng& rng);

// One synchronous parameter-server run. Owns the task, data shards, worker
// states and all rng streams; everything is reproducible from the config.
class Simulation {
 public:
  explicit Simulation(SimConfig cfg);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // One iteration: collect the m gradients, inject faults, then draw the
  // score batch, aggregate, and step. A non-finite update marks the trace
  // diverged and freezes the parameters instead of applying the update.
  std::pair<ParamVector, MetricsRecord> server_step(const ParamVector& x,
                                                    long t);

  // Runs the full loop from the seeded initializer. Resets stream state
  // first, so repeated calls return identical traces.
  Trace run();

  const SimConfig& config() const { return cfg_; }
  const TaskSpec& task() const { return task_; }
  const Dataset& train_data() const { return train_; }
  const Dataset& test_data() const { return test_; }
  const std::vector<WorkerState>& workers() const { return workers_; }
  Rng& server_rng() { return server_rng_; }
  Rng& fault_rng() { return fault_rng_; }
  Rng& worker_rng(int i) { return worker_rngs_[i]; }

  double effective_gamma() const;
  double effective_rho() const;
  ParamVector initial_point();  // consumes init-stream draws unless x0 is set

  // Per-iteration internals captured for tests when enabled.
  struct StepDebug {
    std::vector<int> faulty;
    GradientSet raw;       // as submitted by the workers
    GradientSet injected;  // after gradient-level fault injection
    std::vector<DataPoint> score_batch;
  };
  void set_debug_capture(bool on) { debug_capture_ = on; }
  const StepDebug& last_debug() const { return last_debug_; }

 private:
  void reset_streams();

  SimConfig cfg_;
  TaskSpec task_;
  Dataset train_;
  Dataset test_;
  std::vector<Dataset> shards_;
  std::vector<WorkerState> workers_;
  Rng init_rng_;
  Rng server_rng_;
  Rng fault_rng_;
  std::vector<Rng> worker_rngs_;
  bool diverged_ = false;
  bool debug_capture_ = false;
  StepDebug last_debug_;
};

Trace run_experiment(const SimConfig& cfg);

}  // namespace zeno
