#include "zeno/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace zeno {

namespace {

using nlohmann::json;

std::vector<int> int_list(const json& v, const std::string& field) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer()) {
        throw ConfigError(field + ": expected integers");
      }
      out.push_back(e.get<int>());
    }
  } else if (v.is_number_integer()) {
    out.push_back(v.get<int>());
  } else {
    throw ConfigError(field + ": expected an integer or integer array");
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

std::vector<double> double_list(const json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(field + ": expected numbers");
      out.push_back(e.get<double>());
    }
  } else if (v.is_number()) {
    out.push_back(v.get<double>());
  } else {
    throw ConfigError(field + ": expected a number or number array");
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

std::vector<std::string> string_list(const json& v, const std::string& field) {
  std::vector<std::string> out;
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_string()) throw ConfigError(field + ": expected strings");
      out.push_back(e.get<std::string>());
    }
  } else if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else {
    throw ConfigError(field + ": expected a string or string array");
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

template <typename T>
T scalar(const json& v, const std::string& field) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(field + ": wrong type");
  }
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RunError("cannot open for writing: " + path.string());
  out << body;
  if (!out) throw RunError("write failed: " + path.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<ExperimentConfig::Combination> ExperimentConfig::combinations()
    const {
  std::vector<Combination> out;
  for (AggRule rule : aggregators) {
    for (int q : q_list) {
      for (int b : b_list) {
        for (int nr : nr_list) {
          for (double rho : rho_list) {
            out.push_back(Combination{rule, q, b, nr, rho});
          }
        }
      }
    }
  }
  return out;
}

SimConfig ExperimentConfig::to_sim_config(const Combination& c,
                                          int repeat) const {
  SimConfig sc;
  sc.task = task;
  sc.dimension = dimension;
  sc.num_points = num_points;
  sc.m = m;
  sc.worker_batch = worker_batch;
  sc.zeno_batch = c.nr;
  sc.gamma = gamma;
  sc.schedule = schedule;
  sc.iterations = iterations;
  sc.aggregator = AggregatorConfig{c.rule, c.b};
  sc.rho = c.rho;
  sc.beta = beta;
  sc.fault = FaultSpec{fault_kind, c.q, selection, magnitude};
  sc.data_mode = data_mode;
  sc.seed = seed + static_cast<std::uint64_t>(repeat);
  sc.task_options = task_options;
  sc.x0 = x0;
  return sc;
}

void ExperimentConfig::validate() const {
  if (repeats < 1) throw ConfigError("repeats: must be positive");
  if (epoch_length < 1) throw ConfigError("epoch_length: must be positive");
  if (timing_iters < 1) throw ConfigError("timing_iters: must be positive");
  for (const Combination& c : combinations()) {
    try {
      to_sim_config(c, 0).validate();
    } catch (const std::invalid_argument& e) {
      std::ostringstream msg;
      msg << "combination (aggregator=" << to_string(c.rule) << ", q=" << c.q
          << ", b=" << c.b << ", n_r=" << c.nr << ", rho=" << c.rho
          << "): " << e.what();
      throw ConfigError(msg.str());
    }
  }
}

ExperimentConfig parse_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  bool has_task = false;
  bool has_T = false;
  for (const auto& [key, value] : root.items()) {
    try {
      if (key == "task") {
        cfg.task = task_kind_from_string(scalar<std::string>(value, key));
        has_task = true;
      } else if (key == "T") {
        cfg.iterations = scalar<long>(value, key);
        has_T = true;
      } else if (key == "dimension") {
        cfg.dimension = scalar<int>(value, key);
      } else if (key == "num_points") {
        cfg.num_points = scalar<int>(value, key);
      } else if (key == "m") {
        cfg.m = scalar<int>(value, key);
      } else if (key == "worker_batch") {
        cfg.worker_batch = scalar<int>(value, key);
      } else if (key == "gamma") {
        cfg.gamma = scalar<double>(value, key);
      } else if (key == "lr_schedule") {
        cfg.schedule =
            lr_schedule_from_string(scalar<std::string>(value, key));
      } else if (key == "beta") {
        cfg.beta = scalar<double>(value, key);
      } else if (key == "fault_kind") {
        cfg.fault_kind =
            fault_kind_from_string(scalar<std::string>(value, key));
      } else if (key == "selection") {
        cfg.selection =
            fault_selection_from_string(scalar<std::string>(value, key));
      } else if (key == "magnitude") {
        cfg.magnitude = scalar<double>(value, key);
      } else if (key == "data_mode") {
        cfg.data_mode = data_mode_from_string(scalar<std::string>(value, key));
      } else if (key == "seed") {
        cfg.seed = scalar<std::uint64_t>(value, key);
      } else if (key == "repeats") {
        cfg.repeats = scalar<int>(value, key);
      } else if (key == "epoch_length") {
        cfg.epoch_length = scalar<int>(value, key);
      } else if (key == "output_dir") {
        cfg.output_dir = scalar<std::string>(value, key);
      } else if (key == "aggregator") {
        cfg.aggregators.clear();
        for (const std::string& name : string_list(value, key)) {
          cfg.aggregators.push_back(agg_rule_from_string(name));
        }
      } else if (key == "q") {
        cfg.q_list = int_list(value, key);
      } else if (key == "b") {
        cfg.b_list = int_list(value, key);
      } else if (key == "n_r") {
        cfg.nr_list = int_list(value, key);
      } else if (key == "rho") {
        cfg.rho_list = double_list(value, key);
      } else if (key == "m_sweep") {
        cfg.m_sweep = int_list(value, key);
      } else if (key == "timing_iters") {
        cfg.timing_iters = scalar<int>(value, key);
      } else if (key == "spectrum_min") {
        cfg.task_options.spectrum_min = scalar<double>(value, key);
      } else if (key == "spectrum_max") {
        cfg.task_options.spectrum_max = scalar<double>(value, key);
      } else if (key == "blob_separation") {
        cfg.task_options.blob_separation = scalar<double>(value, key);
      } else if (key == "mlp_hidden") {
        cfg.task_options.mlp_hidden = scalar<int>(value, key);
      } else if (key == "mlp_classes") {
        cfg.task_options.mlp_classes = scalar<int>(value, key);
      } else if (key == "x0") {
        cfg.x0 = double_list(value, key);
      } else {
        throw ConfigError("unknown config field: " + key);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  if (!has_task) throw ConfigError("task: required field missing");
  if (!has_T) throw ConfigError("T: required field missing");
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::filesystem::path resolve_output_dir(const ExperimentConfig& cfg,
                                         const RunOptions& opts) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv("ZENO_OUT_DIR"); env && *env) return env;
  return "zeno_out";
}

std::string trace_filename(const ExperimentConfig::Combination& c,
                           int repeat) {
  char rho[32];
  std::snprintf(rho, sizeof(rho), "%g", c.rho);
  std::ostringstream name;
  name << "trace_" << to_string(c.rule) << "_q" << c.q << "_b" << c.b << "_nr"
       << c.nr << "_rho" << rho << "_rep" << repeat << ".csv";
  return name.str();
}

namespace {

constexpr const char* kTraceHeader =
    "t,epoch,train_loss,grad_norm,test_accuracy,diverged,aggregator,q,b,n_r,"
    "rho,gamma,seed,wallclock_ns\n";

struct EpochAccum {
  double loss = 0.0;
  double grad = 0.0;
  double acc = 0.0;
  long n = 0;
  long acc_n = 0;
  long diverged = 0;
};

}  // namespace

void run_suite(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentConfig effective = cfg;
  if (opts.seed) effective.seed = *opts.seed;
  effective.validate();

  const std::filesystem::path dir = resolve_output_dir(effective, opts);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RunError("cannot create output directory: " + dir.string());

  const auto combos = effective.combinations();
  const long epochs =
      (effective.iterations + effective.epoch_length - 1) /
      effective.epoch_length;

  std::ostringstream summary;
  summary << "aggregator,q,b,n_r,rho,gamma,epoch,train_loss,grad_norm,"
             "test_accuracy,diverged\n";

  for (const auto& combo : combos) {
    std::vector<EpochAccum> acc(epochs);
    double gamma_used = effective.gamma;
    for (int r = 0; r < effective.repeats; ++r) {
      const SimConfig sc = effective.to_sim_config(combo, r);
      Simulation sim(sc);
      gamma_used = sim.effective_gamma();
      const Trace trace = sim.run();

      std::ostringstream body;
      body << kTraceHeader;
      for (const MetricsRecord& rec : trace.records) {
        const long epoch = rec.t / effective.epoch_length;
        body << rec.t << ',' << epoch << ',' << format_double(rec.train_loss)
             << ',' << format_double(rec.true_grad_norm) << ',';
        if (rec.test_accuracy) body << format_double(*rec.test_accuracy);
        body << ',' << (rec.diverged ? 1 : 0) << ','
             << to_string(combo.rule) << ',' << combo.q << ',' << combo.b
             << ',' << combo.nr << ',' << format_double(combo.rho) << ','
             << format_double(gamma_used) << ',' << sc.seed << ','
             << rec.wallclock_ns << '\n';

        EpochAccum& a = acc[epoch];
        a.loss += rec.train_loss;
        a.grad += rec.true_grad_norm;
        if (rec.test_accuracy) {
          a.acc += *rec.test_accuracy;
          ++a.acc_n;
        }
        if (rec.diverged) ++a.diverged;
        ++a.n;
      }

      const std::filesystem::path file = dir / trace_filename(combo, r);
      write_file(file, body.str());
      if (!opts.quiet) std::cout << "wrote " << file.string() << '\n';
    }

    for (long e = 0; e < epochs; ++e) {
      const EpochAccum& a = acc[e];
      summary << to_string(combo.rule) << ',' << combo.q << ',' << combo.b
              << ',' << combo.nr << ',' << format_double(combo.rho) << ','
              << format_double(gamma_used) << ',' << e << ','
              << format_double(a.loss / a.n) << ','
              << format_double(a.grad / a.n) << ',';
      if (a.acc_n > 0) summary << format_double(a.acc / a.acc_n);
      summary << ','
              << format_double(static_cast<double>(a.diverged) / a.n) << '\n';
    }
  }

  const std::filesystem::path summary_file = dir / "summary.csv";
  write_file(summary_file, summary.str());
  if (!opts.quiet) std::cout << "wrote " << summary_file.string() << '\n';
}

void emit_timing(const ExperimentConfig& cfg, const RunOptions& opts) {
  ExperimentConfig effective = cfg;
  if (opts.seed) effective.seed = *opts.seed;
  if (effective.m_sweep.empty()) {
    throw ConfigError("m_sweep: required for timing");
  }
  const int b = effective.b_list.front();
  const int nr = effective.nr_list.front();
  const double rho = effective.rho_list.front();
  for (int m : effective.m_sweep) {
    if (m < 1) throw ConfigError("m_sweep: entries must be positive");
    for (AggRule rule : effective.aggregators) {
      if (rule == AggRule::krum && 2 * b + 2 >= m) {
        throw ConfigError("m_sweep: krum cardinality violated at m=" +
                          std::to_string(m));
      }
      if (rule == AggRule::zeno && b >= m) {
        throw ConfigError("m_sweep: nothing to aggregate at m=" +
                          std::to_string(m));
      }
    }
  }

  const std::filesystem::path dir = resolve_output_dir(effective, opts);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RunError("cannot create output directory: " + dir.string());

  auto [task, data] = make_task(effective.task, effective.dimension,
                                effective.num_points, effective.seed,
                                effective.task_options);
  const int d = task.param_count();

  std::ostringstream body;
  body << "rule,m,d,n_r,iters,median_ns\n";
  double sink = 0.0;

  for (int m : effective.m_sweep) {
    Rng rng(effective.seed + static_cast<std::uint64_t>(m), streams::kInit);
    ParamVector x(static_cast<std::size_t>(d));
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = rng.uniform(-0.5, 0.5);
    const std::vector<DataPoint> grad_batch =
        sample_batch(data, static_cast<std::size_t>(nr), rng);
    const ParamVector g = grad_eval(task, x, grad_batch);

    GradientSet gset;
    gset.candidates.reserve(m);
    for (int i = 0; i < m; ++i) {
      ParamVector c = g;
      for (std::size_t j = 0; j < c.size(); ++j) {
        c[j] += 0.01 * rng.gaussian();
      }
      gset.candidates.push_back(std::move(c));
    }
    const ScoreOracle oracle{
        task, sample_batch(data, static_cast<std::size_t>(nr), rng),
        effective.gamma, rho};

    for (AggRule rule : effective.aggregators) {
      std::vector<std::int64_t> times;
      times.reserve(effective.timing_iters);
      for (int it = 0; it < effective.timing_iters; ++it) {
        const auto start = std::chrono::steady_clock::now();
        switch (rule) {
          case AggRule::mean:
            sink += aggregate_mean(gset)[0];
            break;
          case AggRule::median:
            sink += aggregate_median(gset)[0];
            break;
          case AggRule::krum:
            sink += aggregate_krum(gset, b).vector[0];
            break;
          case AggRule::zeno:
            sink += aggregate_zeno(gset, b, x, oracle).vector[0];
            break;
        }
        const auto stop = std::chrono::steady_clock::now();
        times.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start)
                .count());
      }
      std::sort(times.begin(), times.end());
      const std::int64_t median = times[times.size() / 2];
      body << to_string(rule) << ',' << m << ',' << d << ',' << nr << ','
           << effective.timing_iters << ',' << median << '\n';
    }
  }

  // Keep the accumulated sink observable so the timed calls cannot be
  // optimized away.
  volatile double guard = sink;
  (void)guard;

  const std::filesystem::path file = dir / "timing.csv";
  write_file(file, body.str());
  if (!opts.quiet) std::cout << "wrote " << file.string() << '\n';
}

}  // namespace zeno
