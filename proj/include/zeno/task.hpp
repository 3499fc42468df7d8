#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "zeno/dataset.hpp"
#include "zeno/param_vector.hpp"

namespace zeno {

enum class TaskKind { quadratic, logistic, mlp };

// F(x) = 1/2 (x - x*)' A (x - x*) with diagonal A. Every data point stores
// x* in its features, so any batch reproduces F and its gradient exactly;
// the task is noise-free by construction and L, mu, V are exact.
struct QuadraticModel {
  std::vector<double> hessian_diag;
  std::vector<double> minimizer;
};

// Two gaussian blobs at +/- center with unit noise, labels {0, 1}, binary
// logistic loss on +/-1 encoded labels. The blobs are symmetric about the
// origin so no bias parameter is needed.
struct LogisticModel {
  std::vector<double> center;
};

// One tanh hidden layer followed by softmax cross-entropy over `classes`
// gaussian blobs. Parameters are packed [W1 | b1 | W2 | b2] row-major.
struct MlpModel {
  int hidden = 8;
  int classes = 3;
  std::vector<std::vector<double>> centers;
};

struct TaskSpec {
  TaskKind kind = TaskKind::quadratic;
  int dimension = 1;        // feature dimension
  double smoothness = 1.0;  // L > 0
  double weak_convexity = 1.0;  // mu <= L; negative for non-convex tasks
  std::optional<double> moment_bound;    // per-sample E||grad||^2 at the
                                         // reference point (G)
  std::optional<double> variance_bound;  // per-sample E||grad - mean||^2 at
                                         // the reference point (V)
  bool bounds_exact = false;  // true when L/mu/G/V are exact (quadratic);
                              // otherwise they are seeded empirical estimates
  std::uint64_t generator_seed = 0;
  std::variant<QuadraticModel, LogisticModel, MlpModel> model;

  // Length of a ParamVector for this task; differs from `dimension` only
  // for the mlp, whose parameters are the packed network weights.
  int param_count() const;
  bool is_classification() const { return kind != TaskKind::quadratic; }
  int num_classes() const;
};

struct TaskOptions {
  // Quadratic Hessian spectrum: diagonal entries evenly spaced over
  // [spectrum_min, spectrum_max] (a single entry uses the midpoint).
  double spectrum_min = 0.5;
  double spectrum_max = 2.0;
  // Distance between class centers in units of the unit noise sigma.
  double blob_separation = 4.0;
  int mlp_hidden = 8;
  int mlp_classes = 3;
};

// Mean loss over the batch: (1/|batch|) sum_z f(x; z).
double loss_eval(const TaskSpec& task, const ParamVector& x,
                 std::span<const DataPoint> batch);

// Gradient of the batch-mean loss; same length as x.
ParamVector grad_eval(const TaskSpec& task, const ParamVector& x,
                      std::span<const DataPoint> batch);

// Builds a task and its training dataset from a seed. Deterministic:
// identical arguments reproduce the task and data bit for bit.
std::pair<TaskSpec, Dataset> make_task(TaskKind kind, int dimension,
                                       int num_points, std::uint64_t seed,
                                       const TaskOptions& options = {});

TaskKind task_kind_from_string(const std::string& name);
std::string to_string(TaskKind kind);

// Fresh points from the task's generative model (a held-out draw on its own
// stream); used for test-set evaluation.
Dataset make_eval_dataset(const TaskSpec& task, int num_points);

// Top-1 class prediction; ties go to the lowest class index. Classification
// tasks only.
int predict_class(const TaskSpec& task, const ParamVector& x,
                  const DataPoint& point);

}  // namespace zeno
