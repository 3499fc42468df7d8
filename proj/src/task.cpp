#include "zeno/task.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zeno {

namespace {

void check_inputs(const TaskSpec& task, const ParamVector& x,
                  std::span<const DataPoint> batch) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (static_cast<int>(x.size()) != task.param_count()) {
    throw std::invalid_argument("dimension mismatch");
  }
  for (const DataPoint& p : batch) {
    if (static_cast<int>(p.features.size()) != task.dimension) {
      throw std::invalid_argument("dimension mismatch");
    }
  }
}

// ln(1 + exp(-t)) without overflow for large |t|.
double log1p_exp_neg(double t) {
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double quadratic_point_loss(const QuadraticModel& m, const ParamVector& x,
                            const DataPoint& p) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double r = x[j] - p.features[j];
    s += m.hessian_diag[j] * r * r;
  }
  return 0.5 * s;
}

void quadratic_point_grad(const QuadraticModel& m, const ParamVector& x,
                          const DataPoint& p, ParamVector& acc) {
  for (std::size_t j = 0; j < x.size(); ++j) {
    acc[j] += m.hessian_diag[j] * (x[j] - p.features[j]);
  }
}

double logistic_point_loss(const ParamVector& x, const DataPoint& p) {
  double t = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) t += x[j] * p.features[j];
  const double y = 2.0 * p.label - 1.0;  // {0,1} -> {-1,+1}
  return log1p_exp_neg(y * t);
}

void logistic_point_grad(const ParamVector& x, const DataPoint& p,
                         ParamVector& acc) {
  double t = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) t += x[j] * p.features[j];
  const double y = 2.0 * p.label - 1.0;
  const double w = -y * sigmoid(-y * t);
  for (std::size_t j = 0; j < x.size(); ++j) acc[j] += w * p.features[j];
}

// Parameter packing offsets for the mlp: [W1 (h x d) | b1 (h) | W2 (C x h) |
// b2 (C)], all row-major.
struct MlpLayout {
  int d, h, c;
  int w1() const { return 0; }
  int b1() const { return h * d; }
  int w2() const { return h * d + h; }
  int b2() const { return h * d + h + c * h; }
  int total() const { return h * d + h + c * h + c; }
};

struct MlpForward {
  std::vector<double> a1;      // tanh activations, length h
  std::vector<double> logits;  // length c
  double loss = 0.0;
  int label = 0;
};

MlpForward mlp_forward(const MlpLayout& L, const ParamVector& x,
                       const DataPoint& p) {
  MlpForward f;
  f.label = p.class_id();
  f.a1.resize(L.h);
  for (int i = 0; i < L.h; ++i) {
    double z = x[L.b1() + i];
    const int row = L.w1() + i * L.d;
    for (int j = 0; j < L.d; ++j) z += x[row + j] * p.features[j];
    f.a1[i] = std::tanh(z);
  }
  f.logits.resize(L.c);
  double max_logit = -1e300;
  for (int k = 0; k < L.c; ++k) {
    double z = x[L.b2() + k];
    const int row = L.w2() + k * L.h;
    for (int i = 0; i < L.h; ++i) z += x[row + i] * f.a1[i];
    f.logits[k] = z;
    max_logit = std::max(max_logit, z);
  }
  double lse = 0.0;
  for (int k = 0; k < L.c; ++k) lse += std::exp(f.logits[k] - max_logit);
  f.loss = max_logit + std::log(lse) - f.logits[f.label];
  return f;
}

void mlp_point_grad(const MlpLayout& L, const ParamVector& x,
                    const DataPoint& p, ParamVector& acc) {
  const MlpForward f = mlp_forward(L, x, p);
  double max_logit = *std::max_element(f.logits.begin(), f.logits.end());
  double lse = 0.0;
  for (int k = 0; k < L.c; ++k) lse += std::exp(f.logits[k] - max_logit);

  std::vector<double> dlogits(L.c);
  for (int k = 0; k < L.c; ++k) {
    dlogits[k] = std::exp(f.logits[k] - max_logit) / lse -
                 (k == f.label ? 1.0 : 0.0);
  }
  std::vector<double> da1(L.h, 0.0);
  for (int k = 0; k < L.c; ++k) {
    const int row = L.w2() + k * L.h;
    for (int i = 0; i < L.h; ++i) {
      acc[row + i] += dlogits[k] * f.a1[i];
      da1[i] += dlogits[k] * x[row + i];
    }
    acc[L.b2() + k] += dlogits[k];
  }
  for (int i = 0; i < L.h; ++i) {
    const double dz = da1[i] * (1.0 - f.a1[i] * f.a1[i]);
    const int row = L.w1() + i * L.d;
    for (int j = 0; j < L.d; ++j) acc[row + j] += dz * p.features[j];
    acc[L.b1() + i] += dz;
  }
}

MlpLayout layout_of(const TaskSpec& task) {
  const auto& m = std::get<MlpModel>(task.model);
  return MlpLayout{task.dimension, m.hidden, m.classes};
}

std::vector<double> random_unit_vector(int d, Rng& rng) {
  std::vector<double> v(d);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& c : v) {
      c = rng.gaussian();
      n2 += c * c;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  for (double& c : v) c *= inv;
  return v;
}

DataPoint draw_point(const TaskSpec& task, Rng& rng) {
  DataPoint p;
  p.features.resize(task.dimension);
  if (const auto* q = std::get_if<QuadraticModel>(&task.model)) {
    p.features = q->minimizer;
    p.label = 0.0;
  } else if (const auto* lg = std::get_if<LogisticModel>(&task.model)) {
    const int label = static_cast<int>(rng.uniform_int(2));
    const double sign = label == 1 ? 1.0 : -1.0;
    for (int j = 0; j < task.dimension; ++j) {
      p.features[j] = sign * lg->center[j] + rng.gaussian();
    }
    p.label = label;
  } else {
    const auto& m = std::get<MlpModel>(task.model);
    const int label = static_cast<int>(rng.uniform_int(m.classes));
    for (int j = 0; j < task.dimension; ++j) {
      p.features[j] = m.centers[label][j] + rng.gaussian();
    }
    p.label = label;
  }
  return p;
}

Dataset draw_dataset(const TaskSpec& task, int num_points, Rng& rng) {
  Dataset ds;
  ds.num_classes = task.num_classes();
  ds.points.reserve(num_points);
  for (int i = 0; i < num_points; ++i) ds.points.push_back(draw_point(task, rng));
  return ds;
}

// Largest eigenvalue of (1 / 4n) sum f f' by power iteration; the logistic
// Hessian is bounded above by that matrix.
double logistic_smoothness_estimate(const Dataset& ds, int d, Rng& rng) {
  std::vector<double> v = random_unit_vector(d, rng);
  double lambda = 0.0;
  for (int it = 0; it < 64; ++it) {
    std::vector<double> w(d, 0.0);
    for (const DataPoint& p : ds.points) {
      double t = 0.0;
      for (int j = 0; j < d; ++j) t += p.features[j] * v[j];
      for (int j = 0; j < d; ++j) w[j] += t * p.features[j];
    }
    const double scale = 0.25 / static_cast<double>(ds.size());
    double n2 = 0.0;
    for (int j = 0; j < d; ++j) {
      w[j] *= scale;
      n2 += w[j] * w[j];
    }
    lambda = std::sqrt(n2);
    if (lambda == 0.0) break;
    for (int j = 0; j < d; ++j) v[j] = w[j] / lambda;
  }
  return lambda;
}

// Second-order Taylor ratios 2[f(y) - f(x) - <grad f(x), y - x>] / ||y - x||^2
// probed at random pairs bracket the curvature; max -> L, min -> mu.
std::pair<double, double> mlp_curvature_estimate(const TaskSpec& task,
                                                 const Dataset& ds, Rng& rng) {
  const int n = task.param_count();
  double lo = 1e300, hi = -1e300;
  std::vector<DataPoint> probe_batch(ds.points.begin(),
                                     ds.points.begin() +
                                         std::min<std::size_t>(ds.size(), 64));
  for (int p = 0; p < 200; ++p) {
    ParamVector x(static_cast<std::size_t>(n));
    ParamVector y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      x[j] = rng.uniform(-0.5, 0.5);
      y[j] = x[j] + 0.1 * rng.gaussian();
    }
    const ParamVector diff = y - x;
    const double d2 = squared_norm(diff);
    if (d2 == 0.0) continue;
    const double fy = loss_eval(task, y, probe_batch);
    const double fx = loss_eval(task, x, probe_batch);
    const ParamVector gx = grad_eval(task, x, probe_batch);
    const double ratio = 2.0 * (fy - fx - dot(gx, diff)) / d2;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

// Per-sample gradient variance and second moment at a reference point,
// estimated over fresh draws from the generative model.
void estimate_moments(TaskSpec& task, const ParamVector& ref, Rng& rng) {
  constexpr int kSamples = 10000;
  const int n = task.param_count();
  ParamVector mean(static_cast<std::size_t>(n));
  double second = 0.0;
  std::vector<DataPoint> one(1);
  for (int s = 0; s < kSamples; ++s) {
    one[0] = draw_point(task, rng);
    const ParamVector g = grad_eval(task, ref, one);
    second += squared_norm(g);
    mean += g;
  }
  mean *= 1.0 / kSamples;
  second /= kSamples;
  task.moment_bound = second;
  task.variance_bound = std::max(0.0, second - squared_norm(mean));
}

}  // namespace

int TaskSpec::param_count() const {
  if (kind == TaskKind::mlp) return layout_of(*this).total();
  return dimension;
}

int TaskSpec::num_classes() const {
  switch (kind) {
    case TaskKind::quadratic:
      return 0;
    case TaskKind::logistic:
      return 2;
    case TaskKind::mlp:
      return std::get<MlpModel>(model).classes;
  }
  return 0;
}

double loss_eval(const TaskSpec& task, const ParamVector& x,
                 std::span<const DataPoint> batch) {
  check_inputs(task, x, batch);
  double sum = 0.0;
  switch (task.kind) {
    case TaskKind::quadratic: {
      const auto& m = std::get<QuadraticModel>(task.model);
      for (const DataPoint& p : batch) sum += quadratic_point_loss(m, x, p);
      break;
    }
    case TaskKind::logistic:
      for (const DataPoint& p : batch) sum += logistic_point_loss(x, p);
      break;
    case TaskKind::mlp: {
      const MlpLayout L = layout_of(task);
      for (const DataPoint& p : batch) sum += mlp_forward(L, x, p).loss;
      break;
    }
  }
  return sum / static_cast<double>(batch.size());
}

ParamVector grad_eval(const TaskSpec& task, const ParamVector& x,
                      std::span<const DataPoint> batch) {
  check_inputs(task, x, batch);
  ParamVector acc(x.size());
  switch (task.kind) {
    case TaskKind::quadratic: {
      const auto& m = std::get<QuadraticModel>(task.model);
      for (const DataPoint& p : batch) quadratic_point_grad(m, x, p, acc);
      break;
    }
    case TaskKind::logistic:
      for (const DataPoint& p : batch) logistic_point_grad(x, p, acc);
      break;
    case TaskKind::mlp: {
      const MlpLayout L = layout_of(task);
      for (const DataPoint& p : batch) mlp_point_grad(L, x, p, acc);
      break;
    }
  }
  acc *= 1.0 / static_cast<double>(batch.size());
  return acc;
}

std::pair<TaskSpec, Dataset> make_task(TaskKind kind, int dimension,
                                       int num_points, std::uint64_t seed,
                                       const TaskOptions& options) {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (num_points < 1) {
    throw std::invalid_argument("num_points must be positive");
  }

  TaskSpec task;
  task.kind = kind;
  task.dimension = dimension;
  task.generator_seed = seed;

  Rng params(seed, streams::kTaskParams);
  switch (kind) {
    case TaskKind::quadratic: {
      QuadraticModel m;
      m.hessian_diag.resize(dimension);
      if (dimension == 1) {
        m.hessian_diag[0] = 0.5 * (options.spectrum_min + options.spectrum_max);
      } else {
        for (int j = 0; j < dimension; ++j) {
          m.hessian_diag[j] =
              options.spectrum_min + (options.spectrum_max -
                                      options.spectrum_min) *
                                         j / (dimension - 1.0);
        }
      }
      m.minimizer.resize(dimension);
      for (double& c : m.minimizer) c = params.uniform(-1.0, 1.0);
      task.smoothness =
          *std::max_element(m.hessian_diag.begin(), m.hessian_diag.end());
      task.weak_convexity =
          *std::min_element(m.hessian_diag.begin(), m.hessian_diag.end());
      task.model = std::move(m);
      task.bounds_exact = true;
      break;
    }
    case TaskKind::logistic: {
      LogisticModel m;
      m.center = random_unit_vector(dimension, params);
      const double half = 0.5 * options.blob_separation;
      for (double& c : m.center) c *= half;
      task.model = std::move(m);
      task.weak_convexity = 0.0;  // convex
      break;
    }
    case TaskKind::mlp: {
      MlpModel m;
      m.hidden = std::min(options.mlp_hidden, 16);
      m.classes = options.mlp_classes;
      if (m.hidden < 1 || m.classes < 2) {
        throw std::invalid_argument("invalid mlp shape");
      }
      const double scale = options.blob_separation / std::sqrt(2.0);
      for (int k = 0; k < m.classes; ++k) {
        auto c = random_unit_vector(dimension, params);
        for (double& v : c) v *= scale;
        m.centers.push_back(std::move(c));
      }
      task.model = std::move(m);
      break;
    }
    default:
      throw std::invalid_argument("unknown task kind");
  }

  Rng data(seed, streams::kTaskData);
  Dataset dataset = draw_dataset(task, num_points, data);

  Rng est(seed, streams::kTaskEstimates);
  switch (kind) {
    case TaskKind::quadratic: {
      // Exact: every sample carries the same gradient, so the per-sample
      // variance is zero and the second moment at x = 0 is ||A x*||^2.
      const auto& m = std::get<QuadraticModel>(task.model);
      double g2 = 0.0;
      for (int j = 0; j < dimension; ++j) {
        const double g = m.hessian_diag[j] * m.minimizer[j];
        g2 += g * g;
      }
      task.moment_bound = g2;
      task.variance_bound = 0.0;
      break;
    }
    case TaskKind::logistic: {
      task.smoothness = std::max(logistic_smoothness_estimate(dataset,
                                                              dimension, est),
                                 1e-3);
      estimate_moments(task, ParamVector(static_cast<std::size_t>(dimension)),
                       est);
      break;
    }
    case TaskKind::mlp: {
      const auto [mu, L] = mlp_curvature_estimate(task, dataset, est);
      task.smoothness = std::max(L, 1e-3);
      task.weak_convexity = std::min(mu, task.smoothness);
      // Zero weights make a degenerate reference for the mlp (most gradient
      // blocks vanish); probe the moments at a seeded random point instead.
      ParamVector ref(static_cast<std::size_t>(task.param_count()));
      for (std::size_t j = 0; j < ref.size(); ++j) {
        ref[j] = est.uniform(-0.5, 0.5);
      }
      estimate_moments(task, ref, est);
      break;
    }
  }

  return {std::move(task), std::move(dataset)};
}

Dataset make_eval_dataset(const TaskSpec& task, int num_points) {
  if (num_points < 1) {
    throw std::invalid_argument("num_points must be positive");
  }
  Rng rng(task.generator_seed, streams::kTaskEvalData);
  return draw_dataset(task, num_points, rng);
}

int predict_class(const TaskSpec& task, const ParamVector& x,
                  const DataPoint& point) {
  switch (task.kind) {
    case TaskKind::quadratic:
      throw std::invalid_argument("not a classification task");
    case TaskKind::logistic: {
      // Class scores are (0, <x, f>); strict argmax keeps class 0 on ties.
      double t = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) t += x[j] * point.features[j];
      return t > 0.0 ? 1 : 0;
    }
    case TaskKind::mlp: {
      const MlpForward f = mlp_forward(layout_of(task), x, point);
      int best = 0;
      for (int k = 1; k < static_cast<int>(f.logits.size()); ++k) {
        if (f.logits[k] > f.logits[best]) best = k;
      }
      return best;
    }
  }
  return 0;
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "quadratic") return TaskKind::quadratic;
  if (name == "logistic") return TaskKind::logistic;
  if (name == "mlp") return TaskKind::mlp;
  throw std::invalid_argument("unknown task kind: " + name);
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::quadratic:
      return "quadratic";
    case TaskKind::logistic:
      return "logistic";
    case TaskKind::mlp:
      return "mlp";
  }
  return "?";
}

}  // namespace zeno
