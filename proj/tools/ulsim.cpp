// ulsim: command-line front end for the uplink localization simulator.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "ulsim/core/errors.hpp"
#include "ulsim/scenario/csv.hpp"
#include "ulsim/scenario/parser.hpp"
#include "ulsim/scenario/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitRunError = 2;

struct Common {
  std::string scenario;
  std::string out;
  bool no_boost = false;
  bool no_sched = false;
  int threads = 0;
  std::vector<std::string> points;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("scenario", c.scenario, "Scenario file or bundled scenario name")->required();
  cmd->add_option("--out", c.out, "Output directory (default: out/<scenario>)");
  cmd->add_flag("--no-boost", c.no_boost, "Disable the power boosting step");
  cmd->add_flag("--no-sched-manip", c.no_sched, "Disable scheduling manipulation");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--point", c.points, "Run only these point labels");
}

ulsim::scenario::RunOptions options(const Common& c) {
  ulsim::scenario::RunOptions o;
  if (c.no_boost) {
    o.power_boost = false;
  }
  if (c.no_sched) {
    o.sched_manip = false;
  }
  o.threads = c.threads;
  o.points = c.points;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  namespace sc = ulsim::scenario;
  CLI::App app{"Deterministic LTE uplink localization attack simulator"};
  app.require_subcommand(1);

  Common run_args;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "Run one scenario");
  add_common(run, run_args);
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");

  Common batch_args;
  std::vector<std::uint64_t> seeds;
  auto* batch = app.add_subcommand("batch", "Run a scenario over several seeds and aggregate");
  add_common(batch, batch_args);
  batch->add_option("--seeds", seeds, "Seeds, e.g. --seeds 1 2 3")->required()->delimiter(',');

  std::vector<std::string> to_validate;
  auto* validate = app.add_subcommand("validate", "Parse and validate scenario files");
  validate->add_option("scenarios", to_validate, "Scenario files or names")->required();

  app.add_subcommand("list-scenarios", "List bundled scenarios");

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-scenarios")) {
    for (const std::string& name : sc::bundled_scenarios()) {
      std::cout << name << '\n';
    }
    return kExitOk;
  }

  if (app.got_subcommand("validate")) {
    int rc = kExitOk;
    for (const std::string& name : to_validate) {
      try {
        const sc::Scenario s = sc::load_scenario_file(sc::resolve_scenario_path(name));
        std::cout << "ok " << s.name << " (" << sc::to_string(s.kind) << ")\n";
      } catch (const ulsim::Error& e) {
        std::cerr << "invalid: " << e.what() << '\n';
        rc = kExitInvalid;
      }
    }
    return rc;
  }

  const Common& c = app.got_subcommand("run") ? run_args : batch_args;
  sc::Scenario s;
  try {
    s = sc::load_scenario_file(sc::resolve_scenario_path(c.scenario));
  } catch (const ulsim::Error& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  }
  const std::string out = c.out.empty() ? "out/" + s.name : c.out;

  try {
    sc::RunOptions o = options(c);
    if (app.got_subcommand("run")) {
      if (seed_opt->count() > 0) {
        o.seed = seed;
      }
      const sc::RunResult r = sc::run_scenario(s, o);
      sc::write_run_outputs(out, r);
      std::cout << sc::summary_line(r) << '\n';
    } else {
      const sc::BatchResult b = sc::run_batch(s, seeds, o);
      sc::write_batch_outputs(out, b);
      std::cout << s.name << " runs=" << b.runs.size() << " rows=" << b.p70.rows
                << " success=" << ulsim::format_fixed(b.p70.success_fraction)
                << " p70_dist_m=" << ulsim::format_fixed(b.p70.dist_err_m) << '\n';
    }
  } catch (const ulsim::ConfigError& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "run error: " << e.what() << '\n';
    return kExitRunError;
  }
  return kExitOk;
}
