// zenosim: run fault-tolerant distributed SGD experiments from a JSON
// config, check configs, or benchmark the aggregation rules.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or I/O error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "zeno/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine-fault-tolerant synchronous SGD simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "run the configured experiments");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the config seed");
  run->add_flag("--quiet", quiet, "suppress progress output");

  CLI::App* timing =
      app.add_subcommand("timing", "measure aggregation cost over m_sweep");
  timing->add_option("--config", config_path, "JSON config file")->required();
  timing->add_option("--out", out_dir, "output directory");
  timing->add_option("--seed", seed, "override the config seed");
  timing->add_flag("--quiet", quiet, "suppress progress output");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and check a config file");
  validate->add_option("--config", config_path, "JSON config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const zeno::ExperimentConfig cfg = zeno::parse_config(config_path);
    const zeno::RunOptions opts{out_dir, seed, quiet};
    if (validate->parsed()) {
      std::cout << "ok: " << cfg.combinations().size() << " combination(s) x "
                << cfg.repeats << " repeat(s), T=" << cfg.iterations << '\n';
    } else if (run->parsed()) {
      zeno::run_suite(cfg, opts);
    } else if (timing->parsed()) {
      zeno::emit_timing(cfg, opts);
    }
  } catch (const zeno::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const zeno::RunError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
