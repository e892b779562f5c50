#include "zkdamper/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "zkdamper/error.hpp"

namespace zkdamper {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"domain", {"L", "nx", "ny"}},
      {"equation", {"alpha", "gamma", "nonlinear", "flux"}},
      {"delay", {"h", "n_rho", "transport", "history", "history_file"}},
      {"feedback",
       {"mode", "mu1", "mu2", "a_amplitude", "a_floor", "a_x0", "a_x1", "a_y0", "a_y1", "a_ramp",
        "b_amplitude", "b_floor", "b_x0", "b_x1", "b_y0", "b_y1", "b_ramp"}},
      {"time", {"dt", "t_end", "solver_tol", "record_stride", "snapshot_stride"}},
      {"init",
       {"type", "amplitude", "x0", "y0", "width", "kx", "ky", "modes", "file", "target_norm",
        "seed"}},
      {"certificate",
       {"system", "xi", "mu", "eps", "b_inf", "eta_fraction", "gn_C", "r", "energy", "envelope",
        "gn_samples"}},
      {"output", {"csv", "summary", "certificate", "sweep", "oracle", "gn", "snapshots"}},
  };
  return keys;
}

template <class T>
void read(const pt::ptree& tree, const std::string& key, T& out) {
  const auto node = tree.get_child_optional(pt::ptree::path_type(key, '.'));
  if (!node) return;
  const auto value = node->get_value_optional<T>();
  if (!value) throw ConfigError(fmt::format("bad value '{}' for {}", node->data(), key));
  out = *value;
}

void read_path(const pt::ptree& tree, const std::string& key, const std::filesystem::path& base,
               std::filesystem::path& out) {
  std::string s;
  read(tree, key, s);
  if (s.empty()) return;
  const std::filesystem::path p(s);
  out = p.is_absolute() ? p : base / p;
}

void read_rect(const pt::ptree& tree, const std::string& prefix, CoefficientSpec& c) {
  read(tree, "feedback." + prefix + "_amplitude", c.amplitude);
  read(tree, "feedback." + prefix + "_floor", c.floor);
  read(tree, "feedback." + prefix + "_ramp", c.ramp);
  read(tree, "feedback." + prefix + "_x0", c.region.x0);
  read(tree, "feedback." + prefix + "_x1", c.region.x1);
  read(tree, "feedback." + prefix + "_y0", c.region.y0);
  read(tree, "feedback." + prefix + "_y1", c.region.y1);
}

// Region bounds in the file are fractions of L.
CoefficientSpec scaled(CoefficientSpec c, double L) {
  c.region.x0 *= L;
  c.region.x1 *= L;
  c.region.y0 *= L;
  c.region.y1 *= L;
  c.ramp *= L;
  return c;
}

}  // namespace

EnergyMode Scenario::resolved_energy_mode() const {
  if (energy_mode) return *energy_mode;
  if (cert.system == CertSystem::kZk) return EnergyMode::kPerturbed;
  return feedback == FeedbackMode::kMu ? EnergyMode::kMu : EnergyMode::kZk;
}

Scenario parse_scenario(std::istream& is, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("malformed config: {}", e.message()));
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(fmt::format("unknown section [{}]", section));
    if (body.data().size() && body.empty())
      throw ConfigError(fmt::format("key '{}' outside any section", section));
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError(fmt::format("unknown key {}.{}", section, key));
  }

  Scenario sc;
  read(tree, "domain.L", sc.params.L);
  read(tree, "domain.nx", sc.nx);
  read(tree, "domain.ny", sc.ny);

  read(tree, "equation.alpha", sc.params.alpha);
  read(tree, "equation.gamma", sc.params.gamma);
  read(tree, "equation.nonlinear", sc.scheme.nonlinear);
  std::string flux = "conservative";
  read(tree, "equation.flux", flux);
  if (flux == "conservative") sc.scheme.flux = FluxForm::kConservative;
  else if (flux == "skew") sc.scheme.flux = FluxForm::kSkewSymmetric;
  else throw ConfigError(fmt::format("unknown flux form '{}'", flux));

  read(tree, "delay.h", sc.params.h);
  read(tree, "delay.n_rho", sc.n_rho);
  std::string transport = "cn";
  read(tree, "delay.transport", transport);
  if (transport == "cn") sc.scheme.transport = DelayTransport::kCrankNicolson;
  else if (transport == "characteristic") sc.scheme.transport = DelayTransport::kCharacteristic;
  else throw ConfigError(fmt::format("unknown transport '{}'", transport));
  read(tree, "delay.history", sc.history);
  read_path(tree, "delay.history_file", base_dir, sc.history_file);
  if (sc.history != "frozen" && sc.history != "file")
    throw ConfigError(fmt::format("unknown history mode '{}'", sc.history));

  std::string mode = "mu";
  read(tree, "feedback.mode", mode);
  if (mode == "mu") sc.feedback = FeedbackMode::kMu;
  else if (mode == "ab") sc.feedback = FeedbackMode::kAb;
  else throw ConfigError(fmt::format("unknown feedback mode '{}'", mode));
  read(tree, "feedback.mu1", sc.mu1);
  read(tree, "feedback.mu2", sc.mu2);
  sc.b.amplitude = 0.0;
  read_rect(tree, "a", sc.a);
  read_rect(tree, "b", sc.b);

  read(tree, "time.dt", sc.scheme.dt);
  read(tree, "time.t_end", sc.scheme.t_end);
  read(tree, "time.solver_tol", sc.scheme.solver_tol);
  read(tree, "time.record_stride", sc.scheme.record_stride);
  read(tree, "time.snapshot_stride", sc.scheme.snapshot_stride);

  read(tree, "init.type", sc.init.type);
  read(tree, "init.amplitude", sc.init.amplitude);
  read(tree, "init.x0", sc.init.x0);
  read(tree, "init.y0", sc.init.y0);
  read(tree, "init.width", sc.init.width);
  read(tree, "init.kx", sc.init.kx);
  read(tree, "init.ky", sc.init.ky);
  read(tree, "init.modes", sc.init.modes);
  read_path(tree, "init.file", base_dir, sc.init.file);
  double target = -1.0;
  read(tree, "init.target_norm", target);
  if (target >= 0.0) sc.init.target_norm = target;
  read(tree, "init.seed", sc.seed);

  std::string system = "none";
  read(tree, "certificate.system", system);
  if (system == "none") sc.cert.system = CertSystem::kNone;
  else if (system == "zk") sc.cert.system = CertSystem::kZk;
  else if (system == "mu") sc.cert.system = CertSystem::kMu;
  else throw ConfigError(fmt::format("unknown certificate system '{}'", system));
  read(tree, "certificate.xi", sc.xi);
  read(tree, "certificate.mu", sc.cert.zk.mu);
  read(tree, "certificate.eps", sc.cert.zk.eps);
  double b_inf = -1.0;
  read(tree, "certificate.b_inf", b_inf);
  sc.cert.zk.b_inf = b_inf >= 0.0 ? b_inf : (sc.feedback == FeedbackMode::kAb ? sc.b.amplitude : 0.0);
  read(tree, "certificate.eta_fraction", sc.cert.zk.eta_fraction);
  read(tree, "certificate.gn_C", sc.cert.mu.gn_C);
  read(tree, "certificate.r", sc.cert.mu.r);
  std::string energy;
  read(tree, "certificate.energy", energy);
  if (!energy.empty()) {
    try {
      sc.energy_mode = energy_mode_from_string(energy);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  read(tree, "certificate.envelope", sc.cert.envelope);
  read(tree, "certificate.gn_samples", sc.cert.gn_samples);

  read_path(tree, "output.csv", base_dir, sc.output.csv);
  read_path(tree, "output.summary", base_dir, sc.output.summary);
  read_path(tree, "output.certificate", base_dir, sc.output.certificate);
  read_path(tree, "output.sweep", base_dir, sc.output.sweep);
  read_path(tree, "output.oracle", base_dir, sc.output.oracle);
  read_path(tree, "output.gn", base_dir, sc.output.gn);
  read_path(tree, "output.snapshots", base_dir, sc.output.snapshots);

  try {
    sc.params.validate();
    Grid2D(sc.params.L, sc.nx, sc.ny);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  sc.scheme.validate();
  if (sc.n_rho < 2) throw ConfigError("n_rho must be at least 2");
  if (!(sc.xi > 0.0)) throw ConfigError("xi must be positive");
  if (sc.history == "file" && !std::filesystem::exists(sc.history_file))
    throw ConfigError(fmt::format("history file '{}' not found", sc.history_file.string()));
  if (sc.init.type == "file" && !std::filesystem::exists(sc.init.file))
    throw ConfigError(fmt::format("init file '{}' not found", sc.init.file.string()));
  if (sc.cert.gn_samples < 0) throw ConfigError("gn_samples must be nonnegative");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
  return parse_scenario(in, path.parent_path());
}

std::optional<StabilityCertificate> scenario_certificate(const Scenario& sc) {
  switch (sc.cert.system) {
    case CertSystem::kNone:
      return std::nullopt;
    case CertSystem::kZk: {
      auto in = sc.cert.zk;
      in.xi = sc.xi;
      return certify_zk(sc.params, in);
    }
    case CertSystem::kMu: {
      auto in = sc.cert.mu;
      in.xi = sc.xi;
      in.mu1 = sc.mu1;
      in.mu2 = sc.mu2;
      return certify_mu(sc.params, in);
    }
  }
  return std::nullopt;
}

Coefficients build_coefficients(const Scenario& sc) {
  const auto grid = sc.grid();
  try {
    auto a = build_coefficient(grid, scaled(sc.a, sc.params.L));
    if (sc.feedback == FeedbackMode::kMu) {
      auto fb = Feedback::mu(a, sc.mu1, sc.mu2);
      return {std::move(a), ScalarField(grid), std::move(fb)};
    }
    auto b = sc.b.amplitude == 0.0 ? ScalarField(grid)
                                   : build_coefficient(grid, scaled(sc.b, sc.params.L));
    auto fb = Feedback::ab(a, b);
    return {std::move(a), std::move(b), std::move(fb)};
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

EnergyWeights build_energy_weights(const Scenario& sc, const Coefficients& c) {
  EnergyWeights w;
  w.mode = sc.resolved_energy_mode();
  w.weight = w.mode == EnergyMode::kMu ? c.a : c.b;
  w.xi = sc.xi;
  w.h = sc.params.h;
  return w;
}

namespace {

ScalarField shape(const Scenario& sc, const Grid2D& grid) {
  const double L = sc.params.L;
  const auto& in = sc.init;
  if (in.type == "zero") return ScalarField(grid);
  if (in.type == "gaussian") {
    if (!(in.width > 0.0)) throw ConfigError("gaussian width must be positive");
    const double cx = in.x0 * L, cy = in.y0 * L, w = in.width * L;
    auto f = ScalarField::from_function(grid, [&](double x, double y) {
      return in.amplitude * std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (w * w));
    });
    f.zero_boundary();
    return f;
  }
  if (in.type == "sine") {
    if (in.kx < 1 || in.ky < 1) throw ConfigError("sine modes must be positive");
    auto f = ScalarField::from_function(grid, [&](double x, double y) {
      return in.amplitude * std::sin(in.kx * M_PI * x / L) * std::sin(in.ky * M_PI * y / L);
    });
    f.zero_boundary();
    return f;
  }
  if (in.type == "random") {
    if (in.modes < 1) throw ConfigError("random init needs at least one mode");
    std::mt19937_64 rng(sc.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(in.modes * in.modes));
    for (auto& v : c) v = normal(rng);
    auto f = ScalarField::from_function(grid, [&](double x, double y) {
      double s = 0.0;
      for (int k = 1; k <= in.modes; ++k)
        for (int l = 1; l <= in.modes; ++l)
          s += c[static_cast<std::size_t>((k - 1) * in.modes + l - 1)] / (k * l) *
               std::sin(k * M_PI * x / L) * std::sin(l * M_PI * y / L);
      return s;
    });
    f.zero_boundary();
    const double peak = f.max_abs();
    if (peak > 0.0) f *= in.amplitude / peak;
    return f;
  }
  if (in.type == "file") {
    std::ifstream is(in.file);
    if (!is) throw ConfigError(fmt::format("cannot read init file '{}'", in.file.string()));
    ScalarField f = read_field(is);
    if (!(f.grid() == grid)) throw ConfigError("init file grid does not match [domain]");
    if (!f.satisfies_dirichlet()) throw ConfigError("init file state must vanish on the boundary");
    return f;
  }
  throw ConfigError(fmt::format("unknown init type '{}'", in.type));
}

std::vector<ScalarField> read_history(const Scenario& sc, const Grid2D& grid) {
  std::ifstream is(sc.history_file);
  if (!is) throw ConfigError(fmt::format("cannot read history file '{}'", sc.history_file.string()));
  std::vector<ScalarField> out;
  while (is >> std::ws, !is.eof()) {
    ScalarField f = read_field(is);
    if (!(f.grid() == grid)) throw ConfigError("history snapshot grid does not match [domain]");
    out.push_back(std::move(f));
  }
  if (out.empty()) throw ConfigError("history file holds no snapshots");
  return out;
}

}  // namespace

DelayLine initial_line(const Scenario& sc, const InitialData& data) {
  if (data.history.empty())
    return DelayLine::frozen(data.zeta0, sc.params.h, sc.n_rho, sc.scheme.dt, sc.scheme.transport);
  return DelayLine::from_snapshots(data.zeta0, data.history, sc.params.h, sc.n_rho, sc.scheme.dt,
                                   sc.scheme.transport);
}

InitialData build_initial_data(const Scenario& sc, const EnergyWeights& weights) {
  const auto grid = sc.grid();
  InitialData data{shape(sc, grid), {}};
  if (sc.history == "file") data.history = read_history(sc, grid);
  if (!sc.init.target_norm) return data;

  const double norm = std::sqrt(2.0 * energy(data.zeta0, initial_line(sc, data), weights).total);
  const double target = *sc.init.target_norm;
  if (target == 0.0) {
    data.zeta0 *= 0.0;
    for (auto& f : data.history) f *= 0.0;
    return data;
  }
  if (!(norm > 0.0)) throw ConfigError("cannot rescale zero initial data to a nonzero norm");
  const double s = target / norm;
  data.zeta0 *= s;
  for (auto& f : data.history) f *= s;
  return data;
}

RunSpec build_run(const Scenario& sc, const std::optional<StabilityCertificate>& cert) {
  if (cert && cert->system == "mu" && sc.feedback != FeedbackMode::kMu)
    throw ConfigError("a mu certificate needs feedback.mode = mu");
  if (cert && cert->system == "zk" && sc.feedback != FeedbackMode::kAb)
    throw ConfigError("a zk certificate needs feedback.mode = ab");

  auto coeffs = build_coefficients(sc);
  auto weights = build_energy_weights(sc, coeffs);
  auto data = build_initial_data(sc, weights);

  if (cert && cert->feasible && cert->system == "mu") {
    const EnergyWeights hw{EnergyMode::kMu, coeffs.a, sc.xi, sc.params.h};
    const double norm = std::sqrt(2.0 * energy(data.zeta0, initial_line(sc, data), hw).total);
    const double r = cert->assumed_constants.at("r");
    if (norm > r)
      throw InfeasibleError(
          fmt::format("initial data norm {:.6g} exceeds the certified radius r = {}", norm, r));
  }

  LyapunovSpec lyap;
  std::optional<Envelope> envelope;
  if (cert && cert->feasible) {
    lyap.eta = cert->eta;
    lyap.sigma = cert->sigma;
    if (sc.cert.envelope) envelope = Envelope{cert->theta, cert->kappa};
  }
  return RunSpec{sc.params,
                 std::move(coeffs.feedback),
                 std::move(coeffs.a),
                 sc.scheme,
                 sc.n_rho,
                 std::move(data.zeta0),
                 std::move(data.history),
                 std::move(weights),
                 std::move(lyap),
                 envelope};
}

bool is_sweep_axis(const std::string& axis) {
  return axis == "b_inf" || axis == "mu2" || axis == "h" || axis == "amplitude";
}

void apply_axis(Scenario& sc, const std::string& axis, double value) {
  if (axis == "b_inf") {
    if (sc.feedback != FeedbackMode::kAb) throw ConfigError("axis b_inf needs feedback.mode = ab");
    if (!(value >= 0.0)) throw ConfigError("b_inf must be nonnegative");
    sc.b.amplitude = value;
    sc.b.floor = std::min(sc.b.floor, value);
    sc.cert.zk.b_inf = value;
  } else if (axis == "mu2") {
    sc.mu2 = value;
  } else if (axis == "h") {
    if (!(value > 0.0)) throw ConfigError("h must be positive");
    sc.params.h = value;
  } else if (axis == "amplitude") {
    sc.init.amplitude = value;
    sc.init.target_norm.reset();
  } else {
    throw ConfigError(fmt::format("unknown sweep axis '{}'", axis));
  }
}

}  // namespace zkdamper
