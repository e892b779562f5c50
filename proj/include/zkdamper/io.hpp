#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zkdamper/certificate.hpp"
#include "zkdamper/diagnostics.hpp"

namespace zkdamper {

inline constexpr std::string_view kCsvHeader =
    "t,E_total,E_state,E_delay,V_lyap,V1,V2,flux_x0,flux_y0,linf_state";
inline constexpr std::string_view kSweepHeader = "value,rate_fit,envelope_violations,status";

// Floats use 17 significant digits; non-finite values are written as nan/inf.
std::string format_double(double v);

void write_records_csv(std::ostream& os, const std::vector<EnergyRecord>& records);

struct RunSummary {
  std::optional<double> rate_fit;
  std::optional<double> rate_residual;
  std::optional<double> theta_cert;
  std::optional<double> kappa_cert;
  std::size_t envelope_violations = 0;
  std::string status;
  std::string energy_mode;
  // decay | growth | flat | undefined
  std::string trend;
  std::string note;
};

// Fits the decay rate over the default window when every energy there is positive.
RunSummary summarize(const std::vector<EnergyRecord>& records, std::size_t envelope_violations,
                     const std::string& status, const std::optional<StabilityCertificate>& cert,
                     EnergyMode mode);

std::string summary_json(const RunSummary& s);
std::string certificate_json(const StabilityCertificate& c);

struct SweepRow {
  double value;
  std::optional<double> rate_fit;
  std::size_t envelope_violations;
  std::string status;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Writes to path (creating parent directories) through a temporary file and a rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace zkdamper
