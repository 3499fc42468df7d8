#include "zeno/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace zeno {

void SimConfig::validate() const {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  if (num_points < 1) {
    throw std::invalid_argument("num_points must be positive");
  }
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (worker_batch < 1) {
    throw std::invalid_argument("worker_batch must be positive");
  }
  if (zeno_batch < 1) throw std::invalid_argument("n_r must be positive");
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (rho < 0.0) throw std::invalid_argument("rho must be non-negative");
  if (beta && *beta < 0.0) {
    throw std::invalid_argument("beta must be non-negative");
  }
  if (iterations < 1) throw std::invalid_argument("T must be positive");
  if (fault.q < 0 || fault.q > m) {
    throw std::invalid_argument("q exceeds worker count");
  }
  if (fault.kind == FaultKind::label_flip && task == TaskKind::quadratic) {
    throw std::invalid_argument("label_flip requires a classification task");
  }
  switch (aggregator.rule) {
    case AggRule::krum:
      if (aggregator.b < 0 || 2 * aggregator.b + 2 >= m) {
        throw std::invalid_argument("krum cardinality violated");
      }
      break;
    case AggRule::zeno:
      if (aggregator.b < 0 || aggregator.b >= m) {
        throw std::invalid_argument("nothing to aggregate");
      }
      break;
    default:
      break;
  }
  if (data_mode == DataMode::disjoint && num_points < m) {
    throw std::invalid_argument("disjoint mode needs at least m data points");
  }
}

EvalResult evaluate(const TaskSpec& task, const ParamVector& x,
                    const Dataset& dataset) {
  if (dataset.empty()) throw std::invalid_argument("dataset is empty");
  EvalResult out;
  out.loss = loss_eval(task, x, dataset.points);
  if (task.is_classification()) {
    std::size_t hits = 0;
    for (const DataPoint& p : dataset.points) {
      if (predict_class(task, x, p) == p.class_id()) ++hits;
    }
    out.accuracy = static_cast<double>(hits) / dataset.size();
  }
  return out;
}

ParamVector worker_step(const WorkerState& w, const ParamVector& x,
                        const SimConfig& cfg, const TaskSpec& task, Rng& rng) {
  std::vector<DataPoint> batch =
      sample_batch(*w.data, static_cast<std::size_t>(cfg.worker_batch), rng);
  if (w.faulty_this_iter && cfg.fault.kind == FaultKind::label_flip) {
    for (DataPoint& p : batch) {
      p.label = flip_label(p.class_id(), w.data->num_classes);
    }
  }
  return grad_eval(task, x, batch);
}

Simulation::Simulation(SimConfig cfg)
    : cfg_(std::move(cfg)),
      init_rng_(cfg_.seed, streams::kInit),
      server_rng_(cfg_.seed, streams::kServerBatch),
      fault_rng_(cfg_.seed, streams::kFaultSelection) {
  cfg_.validate();
  auto [task, data] = make_task(cfg_.task, cfg_.dimension, cfg_.num_points,
                                cfg_.seed, cfg_.task_options);
  task_ = std::move(task);
  train_ = std::move(data);
  if (task_.is_classification()) {
    test_ = make_eval_dataset(task_, cfg_.num_points);
  }
  if (cfg_.x0 &&
      static_cast<int>(cfg_.x0->size()) != task_.param_count()) {
    throw std::invalid_argument("x0 dimension mismatch");
  }

  if (cfg_.data_mode == DataMode::disjoint) {
    shards_ = partition_dataset(train_, static_cast<std::size_t>(cfg_.m));
  }
  workers_.reserve(cfg_.m);
  worker_rngs_.reserve(cfg_.m);
  for (int i = 0; i < cfg_.m; ++i) {
    const Dataset* source =
        cfg_.data_mode == DataMode::disjoint ? &shards_[i] : &train_;
    workers_.push_back(WorkerState{i, source, false});
    worker_rngs_.emplace_back(cfg_.seed, streams::kWorkerBase + i);
  }
}

void Simulation::reset_streams() {
  init_rng_ = Rng(cfg_.seed, streams::kInit);
  server_rng_ = Rng(cfg_.seed, streams::kServerBatch);
  fault_rng_ = Rng(cfg_.seed, streams::kFaultSelection);
  for (int i = 0; i < cfg_.m; ++i) {
    worker_rngs_[i] = Rng(cfg_.seed, streams::kWorkerBase + i);
  }
  diverged_ = false;
}

double Simulation::effective_gamma() const {
  if (cfg_.schedule == LrSchedule::inv_sqrt_T) {
    return 1.0 / (task_.smoothness *
                  std::sqrt(static_cast<double>(cfg_.iterations)));
  }
  return cfg_.gamma;
}

double Simulation::effective_rho() const {
  if (cfg_.beta) {
    const double g = effective_gamma();
    return *cfg_.beta * g * g / 2.0;
  }
  return cfg_.rho;
}

ParamVector Simulation::initial_point() {
  if (cfg_.x0) return ParamVector(*cfg_.x0);
  ParamVector x(static_cast<std::size_t>(task_.param_count()));
  for (std::size_t j = 0; j < x.size(); ++j) {
    x[j] = init_rng_.uniform(-0.5, 0.5);
  }
  return x;
}

std::pair<ParamVector, MetricsRecord> Simulation::server_step(
    const ParamVector& x, long t) {
  const double gamma_t = effective_gamma();

  std::vector<int> faulty;
  if (cfg_.fault.kind != FaultKind::none && cfg_.fault.q > 0) {
    faulty = select_faulty(cfg_.m, cfg_.fault.q, cfg_.fault.selection, t,
                           fault_rng_);
  }

  GradientSet gset;
  gset.candidates.reserve(cfg_.m);
  for (int i = 0; i < cfg_.m; ++i) {
    workers_[i].faulty_this_iter =
        std::binary_search(faulty.begin(), faulty.end(), i);
    gset.candidates.push_back(
        worker_step(workers_[i], x, cfg_, task_, worker_rngs_[i]));
  }
  if (cfg_.fault.kind != FaultKind::none) gset.truth = faulty;
  if (debug_capture_) {
    last_debug_.faulty = faulty;
    last_debug_.raw = gset;
  }

  switch (cfg_.fault.kind) {
    case FaultKind::bit_flip:
      gset = apply_bit_flip(std::move(gset), faulty);
      break;
    case FaultKind::arbitrary:
      gset = apply_arbitrary(std::move(gset), faulty, cfg_.fault.magnitude,
                             fault_rng_);
      break;
    default:
      break;
  }

  // The score batch is drawn only now, after the candidates are fixed; a
  // faulty worker can never anticipate it.
  std::vector<DataPoint> score_batch = sample_batch(
      train_, static_cast<std::size_t>(cfg_.zeno_batch), server_rng_);
  if (debug_capture_) {
    last_debug_.injected = gset;
    last_debug_.score_batch = score_batch;
  }

  ParamVector aggregate;
  std::vector<int> selected;
  const auto started = std::chrono::steady_clock::now();
  switch (cfg_.aggregator.rule) {
    case AggRule::mean:
      aggregate = aggregate_mean(gset);
      break;
    case AggRule::median:
      aggregate = aggregate_median(gset);
      break;
    case AggRule::krum: {
      KrumResult r = aggregate_krum(gset, cfg_.aggregator.b);
      aggregate = std::move(r.vector);
      selected = {r.chosen};
      break;
    }
    case AggRule::zeno: {
      ScoreOracle oracle{task_, std::move(score_batch), gamma_t,
                         effective_rho()};
      ZenoResult r = aggregate_zeno(gset, cfg_.aggregator.b, x, oracle);
      aggregate = std::move(r.vector);
      selected = std::move(r.selected);
      break;
    }
  }
  const auto finished = std::chrono::steady_clock::now();

  ParamVector next = x;
  for (std::size_t k = 0; k < next.size(); ++k) {
    next[k] -= gamma_t * aggregate[k];
  }
  if (!next.is_finite()) {
    // Freeze at the last finite parameters; the flag stays up for the rest
    // of the trace.
    diverged_ = true;
    next = x;
  }

  MetricsRecord rec;
  rec.t = t;
  rec.train_loss = loss_eval(task_, next, train_.points);
  rec.true_grad_norm = norm(grad_eval(task_, next, train_.points));
  if (task_.is_classification()) {
    rec.test_accuracy = evaluate(task_, next, test_).accuracy;
  }
  rec.selected = std::move(selected);
  rec.wallclock_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(finished - started)
          .count();
  rec.diverged = diverged_;
  return {std::move(next), std::move(rec)};
}

Trace Simulation::run() {
  reset_streams();
  Trace trace;
  trace.config = cfg_;
  ParamVector x = initial_point();
  trace.initial_loss = loss_eval(task_, x, train_.points);
  trace.initial_grad_norm = norm(grad_eval(task_, x, train_.points));
  if (task_.is_classification()) {
    trace.initial_accuracy = evaluate(task_, x, test_).accuracy;
  }
  trace.records.reserve(cfg_.iterations);
  for (long t = 0; t < cfg_.iterations; ++t) {
    auto [next, rec] = server_step(x, t);
    x = std::move(next);
    trace.records.push_back(std::move(rec));
  }
  trace.final_x = std::move(x);
  return trace;
}

Trace run_experiment(const SimConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

LrSchedule lr_schedule_from_string(const std::string& name) {
  if (name == "constant") return LrSchedule::constant;
  if (name == "inv_sqrt_T") return LrSchedule::inv_sqrt_T;
  throw std::invalid_argument("unknown lr schedule: " + name);
}

std::string to_string(LrSchedule s) {
  return s == LrSchedule::constant ? "constant" : "inv_sqrt_T";
}

DataMode data_mode_from_string(const std::string& name) {
  if (name == "iid") return DataMode::iid;
  if (name == "disjoint") return DataMode::disjoint;
  throw std::invalid_argument("unknown data mode: " + name);
}

std::string to_string(DataMode m) {
  return m == DataMode::iid ? "iid" : "disjoint";
}

}  // namespace zeno
