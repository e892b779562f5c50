#include "zkdamper/io.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "zkdamper/error.hpp"

namespace zkdamper {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

void write_records_csv(std::ostream& os, const std::vector<EnergyRecord>& records) {
  os << kCsvHeader << '\n';
  for (const auto& r : records) {
    const double row[] = {r.t,  r.E_total, r.E_state, r.E_delay, r.V_lyap,
                          r.V1, r.V2,      r.flux_x0, r.flux_y0, r.linf_state};
    for (std::size_t k = 0; k < std::size(row); ++k) os << (k ? "," : "") << format_double(row[k]);
    os << '\n';
  }
}

RunSummary summarize(const std::vector<EnergyRecord>& records, std::size_t envelope_violations,
                     const std::string& status, const std::optional<StabilityCertificate>& cert,
                     EnergyMode mode) {
  RunSummary s;
  s.envelope_violations = envelope_violations;
  s.status = status;
  s.energy_mode = to_string(mode);
  if (cert && cert->feasible) {
    s.theta_cert = cert->theta;
    s.kappa_cert = cert->kappa;
  }
  try {
    const auto fit = fit_decay_rate(records);
    s.rate_fit = fit.rate;
    s.rate_residual = fit.residual;
    s.trend = fit.rate > 0.0 ? "decay" : (fit.rate < 0.0 ? "growth" : "flat");
  } catch (const Error& e) {
    s.trend = "undefined";
    s.note = e.what();
  }
  return s;
}

namespace {

std::string number(std::optional<double> v) {
  return v && std::isfinite(*v) ? format_double(*v) : "null";
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

}  // namespace

std::string summary_json(const RunSummary& s) {
  std::string out = "{\n";
  out += fmt::format("  \"rate_fit\": {},\n", number(s.rate_fit));
  out += fmt::format("  \"rate_residual\": {},\n", number(s.rate_residual));
  out += fmt::format("  \"theta_cert\": {},\n", number(s.theta_cert));
  out += fmt::format("  \"kappa_cert\": {},\n", number(s.kappa_cert));
  out += fmt::format("  \"envelope_violations\": {},\n", s.envelope_violations);
  out += fmt::format("  \"status\": {},\n", quoted(s.status));
  out += fmt::format("  \"energy_mode\": {},\n", quoted(s.energy_mode));
  out += fmt::format("  \"trend\": {},\n", quoted(s.trend));
  out += fmt::format("  \"note\": {}\n", quoted(s.note));
  out += "}\n";
  return out;
}

std::string certificate_json(const StabilityCertificate& c) {
  std::string out = "{\n";
  out += fmt::format("  \"system\": {},\n", quoted(c.system));
  out += fmt::format("  \"xi\": {},\n", number(c.xi));
  out += fmt::format("  \"eta\": {},\n", number(c.eta));
  out += fmt::format("  \"sigma\": {},\n", number(c.sigma));
  out += fmt::format("  \"theta\": {},\n", number(c.theta));
  out += fmt::format("  \"kappa\": {},\n", number(c.kappa));
  out += fmt::format("  \"kappa_alt\": {},\n", number(c.kappa_alt));
  out += fmt::format("  \"T0\": {},\n", number(c.T0));
  out += fmt::format("  \"nu\": {},\n", number(c.nu));
  out += fmt::format("  \"Tmin\": {},\n", number(c.Tmin));
  out += fmt::format("  \"r_max\": {},\n", number(c.r_max));
  out += fmt::format("  \"feasible\": {},\n", c.feasible ? "true" : "false");
  out += "  \"assumed_constants\": {";
  bool first = true;
  for (const auto& [k, v] : c.assumed_constants) {
    out += fmt::format("{}{}: {}", first ? "" : ", ", quoted(k), number(v));
    first = false;
  }
  out += "},\n  \"diagnostics\": [";
  for (std::size_t k = 0; k < c.diagnostics.size(); ++k)
    out += (k ? ", " : "") + quoted(c.diagnostics[k]);
  out += "]\n}\n";
  return out;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows)
    os << format_double(r.value) << ',' << (r.rate_fit ? format_double(*r.rate_fit) : "") << ','
       << r.envelope_violations << ',' << r.status << '\n';
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace zkdamper
