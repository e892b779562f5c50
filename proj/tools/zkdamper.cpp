#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "zkdamper/commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("zkdamper");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ZKDAMPER_LOG"))
    spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"zkdamper: delayed damped Zakharov-Kuznetsov lab"};
  app.require_subcommand(1);

  zkdamper::CommandOptions opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "scenario config file")->required();
    sub->add_option("--seed", seed, "seed for random initial data");
    sub->add_option("--jobs", opts.jobs, "concurrent runs (sweep)")->check(CLI::PositiveNumber);
  };

  auto* certify = app.add_subcommand("certify", "write the stability certificate");
  auto* simulate = app.add_subcommand("simulate", "run one scenario");
  auto* sweep = app.add_subcommand("sweep", "run a scenario over a parameter axis");
  auto* oracle = app.add_subcommand("oracle-check", "compare the stepper with exp(tA)");
  auto* gn = app.add_subcommand("gn-estimate", "estimate the Gagliardo-Nirenberg constant");
  for (auto* sub : {certify, simulate, sweep, oracle, gn}) add_common(sub);
  sweep->add_option("--axis", opts.axis, "b_inf | mu2 | h | amplitude")->required();
  sweep->add_option("--values", opts.values, "comma separated values")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : zkdamper::kExitConfig;
  }
  for (auto* sub : {certify, simulate, sweep, oracle, gn})
    if (sub->count("--seed")) opts.seed = seed;

  if (*certify) return zkdamper::cmd_certify(opts, std::cout, std::cerr);
  if (*simulate) return zkdamper::cmd_simulate(opts, std::cout, std::cerr);
  if (*sweep) return zkdamper::cmd_sweep(opts, std::cout, std::cerr);
  if (*oracle) return zkdamper::cmd_oracle_check(opts, std::cout, std::cerr);
  return zkdamper::cmd_gn_estimate(opts, std::cout, std::cerr);
}
