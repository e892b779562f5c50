#include "zkdamper/commands.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "zkdamper/error.hpp"
#include "zkdamper/io.hpp"
#include "zkdamper/scenario.hpp"

namespace zkdamper {

namespace {

Scenario load(const CommandOptions& opts) {
  auto sc = load_scenario(opts.config);
  if (opts.seed) sc.seed = *opts.seed;
  return sc;
}

std::filesystem::path or_default(const std::filesystem::path& p, const CommandOptions& opts,
                                 const std::string& suffix) {
  if (!p.empty()) return p;
  auto out = opts.config.parent_path() / opts.config.stem();
  out += suffix;
  return out;
}

// Runs body and maps library errors onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

void report_infeasible(const StabilityCertificate& cert, std::ostream& err) {
  err << "certificate infeasible\n";
  for (const auto& d : cert.diagnostics) err << "  " << d << '\n';
}

struct RunOutcome {
  Trajectory traj;
  RunSummary summary;
};

RunOutcome run_scenario(const Scenario& sc, const std::optional<StabilityCertificate>& cert) {
  const auto spec = build_run(sc, cert);
  auto traj = simulate(spec);
  auto summary = summarize(traj.records, traj.envelope_violations, to_string(traj.status), cert,
                           spec.energy.mode);
  if (!traj.message.empty()) summary.note = traj.message;
  return {std::move(traj), std::move(summary)};
}

}  // namespace

int cmd_certify(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sc = load(opts);
    const auto cert = scenario_certificate(sc);
    if (!cert) throw ConfigError("certify needs certificate.system = zk or mu");
    const auto json = certificate_json(*cert);
    if (sc.output.certificate.empty()) out << json;
    else write_text_file(sc.output.certificate, json);
    if (!cert->feasible) {
      report_infeasible(*cert, err);
      return static_cast<int>(kExitInfeasible);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_simulate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sc = load(opts);
    const auto cert = scenario_certificate(sc);
    if (cert && !cert->feasible) {
      report_infeasible(*cert, err);
      return static_cast<int>(kExitInfeasible);
    }
    spdlog::info("simulating {} steps on a {}x{} grid", std::llround(sc.scheme.t_end / sc.scheme.dt),
                 sc.nx, sc.ny);
    const auto run = run_scenario(sc, cert);

    std::ostringstream csv;
    write_records_csv(csv, run.traj.records);
    const auto csv_path = or_default(sc.output.csv, opts, ".csv");
    const auto summary_path = or_default(sc.output.summary, opts, ".summary.json");
    write_text_file(csv_path, csv.str());
    write_text_file(summary_path, summary_json(run.summary));
    if (!sc.output.snapshots.empty()) {
      std::ostringstream snaps;
      for (const auto& [t, f] : run.traj.snapshots) write_field(snaps, f);
      write_text_file(sc.output.snapshots, snaps.str());
    }
    out << fmt::format("status {} rate_fit {} envelope_violations {}\n", run.summary.status,
                       run.summary.rate_fit ? format_double(*run.summary.rate_fit) : "undefined",
                       run.summary.envelope_violations);
    if (run.traj.status != RunStatus::kCompleted) {
      err << run.traj.message << '\n';
      return static_cast<int>(kExitBlowUp);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!is_sweep_axis(opts.axis))
      throw ConfigError(fmt::format("unknown sweep axis '{}' (b_inf, mu2, h, amplitude)", opts.axis));
    if (opts.values.empty()) throw ConfigError("sweep needs at least one value");
    if (opts.jobs < 1) throw ConfigError("jobs must be at least 1");
    const auto base = load(opts);

    std::vector<Scenario> runs;
    for (double v : opts.values) {
      auto sc = base;
      apply_axis(sc, opts.axis, v);
      runs.push_back(std::move(sc));
    }

    std::vector<SweepRow> rows(runs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t k = next++; k < runs.size(); k = next++) {
        SweepRow row{opts.values[k], std::nullopt, 0, ""};
        try {
          const auto cert = scenario_certificate(runs[k]);
          if (cert && !cert->feasible) {
            row.status = "infeasible";
          } else {
            const auto run = run_scenario(runs[k], cert);
            row.rate_fit = run.summary.rate_fit;
            row.envelope_violations = run.summary.envelope_violations;
            row.status = run.summary.status;
          }
        } catch (const ConfigError& e) {
          spdlog::warn("sweep value {}: {}", opts.values[k], e.what());
          row.status = "config-error";
        } catch (const Error& e) {
          spdlog::warn("sweep value {}: {}", opts.values[k], e.what());
          row.status = "error";
        }
        rows[k] = std::move(row);
      }
    };
    const auto n = std::min<std::size_t>(static_cast<std::size_t>(opts.jobs), runs.size());
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();

    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    const auto path = or_default(base.output.sweep, opts, ".sweep.csv");
    write_text_file(path, csv.str());
    out << csv.str();
    return static_cast<int>(kExitOk);
  });
}

int cmd_oracle_check(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto sc = load(opts);
    if (sc.history != "frozen") throw ConfigError("oracle-check supports frozen history only");
    auto coeffs = build_coefficients(sc);
    const auto weights = build_energy_weights(sc, coeffs);
    auto data = build_initial_data(sc, weights);
    const OracleScenario oracle{sc.params,           coeffs.a, coeffs.feedback, sc.xi, sc.n_rho,
                                std::move(data.zeta0), sc.scheme.t_end, sc.scheme.dt};
    const auto r = oracle_compare(oracle);
    const auto json = fmt::format(
        "{{\n  \"relative_error\": {},\n  \"relative_error_half\": {},\n  \"ratio\": {},\n"
        "  \"exact_norm\": {},\n  \"unknowns\": {}\n}}\n",
        format_double(r.relative_error), format_double(r.relative_error_half),
        std::isfinite(r.ratio) ? format_double(r.ratio) : "null", format_double(r.exact_norm),
        sc.grid().interior_count() * static_cast<std::size_t>(sc.n_rho + 1));
    if (sc.output.oracle.empty()) out << json;
    else write_text_file(sc.output.oracle, json);
    return static_cast<int>(kExitOk);
  });
}

int cmd_gn_estimate(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto sc = load(opts);
    const auto grid = sc.grid();
    std::vector<ScalarField> ensemble;
    auto draw = sc;
    draw.init.type = "random";
    draw.init.amplitude = 1.0;
    draw.init.target_norm.reset();
    draw.history = "frozen";
    std::mt19937_64 seeds(sc.seed);
    const EnergyWeights unused{EnergyMode::kMu, ScalarField(grid), 1.0, sc.params.h};
    for (int k = 0; k < sc.cert.gn_samples; ++k) {
      draw.seed = seeds();
      ensemble.push_back(build_initial_data(draw, unused).zeta0);
    }
    auto sine = ScalarField::from_function(grid, [&](double x, double y) {
      return std::sin(M_PI * x / sc.params.L) * std::sin(M_PI * y / sc.params.L);
    });
    sine.zero_boundary();
    const double c_emp = gn_estimate(grid, ensemble);
    const auto json = fmt::format(
        "{{\n  \"C_emp\": {},\n  \"sin_sin_ratio\": {},\n  \"samples\": {},\n  \"nx\": {},\n"
        "  \"ny\": {}\n}}\n",
        format_double(c_emp), format_double(gn_ratio(sine)), ensemble.size() + 1, sc.nx, sc.ny);
    if (sc.output.gn.empty()) out << json;
    else write_text_file(sc.output.gn, json);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace zkdamper
