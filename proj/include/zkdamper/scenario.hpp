#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zkdamper/certificate.hpp"
#include "zkdamper/diagnostics.hpp"
#include "zkdamper/field.hpp"
#include "zkdamper/stepper.hpp"

namespace zkdamper {

enum class FeedbackMode { kAb, kMu };
enum class CertSystem { kNone, kZk, kMu };

struct InitSpec {
  std::string type = "gaussian";  // gaussian | sine | random | file | zero
  double amplitude = 0.1;
  double x0 = 0.5;  // gaussian centre, as a fraction of L
  double y0 = 0.5;
  double width = 0.1;  // gaussian width, as a fraction of L
  int kx = 1;
  int ky = 1;
  int modes = 4;  // random: sine modes per axis
  std::filesystem::path file;
  // Rescale so that the state-space norm of (zeta0, z0) equals this value.
  std::optional<double> target_norm;
};

struct CertSpec {
  CertSystem system = CertSystem::kNone;
  ZkCertInputs zk;
  MuCertInputs mu;
  bool envelope = true;
  int gn_samples = 20;
};

struct OutputSpec {
  std::filesystem::path csv;
  std::filesystem::path summary;
  std::filesystem::path certificate;
  std::filesystem::path sweep;
  std::filesystem::path oracle;
  std::filesystem::path gn;
  std::filesystem::path snapshots;
};

struct Scenario {
  PhysicalParams params;
  int nx = 32;
  int ny = 32;
  FeedbackMode feedback = FeedbackMode::kMu;
  CoefficientSpec a;
  CoefficientSpec b;
  double mu1 = 1.0;
  double mu2 = 0.5;
  int n_rho = 8;
  std::string history = "frozen";  // frozen | file
  std::filesystem::path history_file;
  SchemeConfig scheme;
  InitSpec init;
  std::optional<EnergyMode> energy_mode;
  double xi = 1.0;  // energy weight, shared with the certificate
  CertSpec cert;
  OutputSpec output;
  std::uint64_t seed = 0;

  Grid2D grid() const { return Grid2D(params.L, nx, ny); }
  EnergyMode resolved_energy_mode() const;
};

// Sections [domain] [equation] [delay] [feedback] [time] [init] [certificate]
// [output]. Relative paths resolve against base_dir. Throws ConfigError.
Scenario parse_scenario(std::istream& is, const std::filesystem::path& base_dir);
Scenario load_scenario(const std::filesystem::path& path);

std::optional<StabilityCertificate> scenario_certificate(const Scenario& sc);

struct Coefficients {
  ScalarField a;
  ScalarField b;  // zero in the mu mode
  Feedback feedback;
};

Coefficients build_coefficients(const Scenario& sc);

// Initial state and past snapshots (empty for frozen history), rescaled to
// init.target_norm when set.
struct InitialData {
  ScalarField zeta0;
  std::vector<ScalarField> history;
};

InitialData build_initial_data(const Scenario& sc, const EnergyWeights& weights);

// The history line the run starts from.
DelayLine initial_line(const Scenario& sc, const InitialData& data);

EnergyWeights build_energy_weights(const Scenario& sc, const Coefficients& c);

RunSpec build_run(const Scenario& sc, const std::optional<StabilityCertificate>& cert);

// b_inf | mu2 | h | amplitude. Throws ConfigError for unknown axes.
void apply_axis(Scenario& sc, const std::string& axis, double value);
bool is_sweep_axis(const std::string& axis);

}  // namespace zkdamper
