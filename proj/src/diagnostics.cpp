#include "zkdamper/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "zkdamper/error.hpp"

namespace zkdamper {

const char* to_string(EnergyMode mode) {
  switch (mode) {
    case EnergyMode::kZk: return "zk";
    case EnergyMode::kPerturbed: return "perturbed";
    case EnergyMode::kMu: return "mu";
  }
  return "?";
}

EnergyMode energy_mode_from_string(const std::string& name) {
  if (name == "zk") return EnergyMode::kZk;
  if (name == "perturbed") return EnergyMode::kPerturbed;
  if (name == "mu") return EnergyMode::kMu;
  throw ConfigError("unknown energy mode '" + name + "'");
}

double EnergyWeights::factor() const {
  switch (mode) {
    case EnergyMode::kZk: return h / 2.0;
    case EnergyMode::kPerturbed: return xi * h / 2.0;
    case EnergyMode::kMu: return xi / 2.0;
  }
  return 0.0;
}

EnergyParts energy(const ScalarField& zeta, const DelayLine& line, const EnergyWeights& w) {
  if (!w.weight) throw ConfigError("energy needs a weight field");
  const double state = 0.5 * integrate_weighted(ScalarField(zeta.grid(), 1.0), zeta, 2);
  const double delay = delay_energy(line, *w.weight, w.factor());
  return {state, delay, state + delay};
}

LyapunovParts lyapunov(const ScalarField& zeta, const DelayLine& line, double eta, double sigma,
                       const ScalarField& weight, double energy_total) {
  const Grid2D& g = zeta.grid();
  const ScalarField x = ScalarField::from_function(g, [](double xx, double) { return xx; });
  const double V1 = integrate_weighted(x, zeta, 2);
  const double V2 = delay_energy(line, weight, line.h() / 2.0, Taper::kLinear);
  return {energy_total + eta * V1 + sigma * V2, V1, V2};
}

TraceFluxes boundary_fluxes(const ScalarField& zeta) {
  const Grid2D& g = zeta.grid();
  const int nx = g.nx(), ny = g.ny();
  double x0 = 0.0, y0 = 0.0;
  for (int j = 0; j <= ny + 1; ++j) {
    const double d = (4.0 * zeta(1, j) - zeta(2, j)) / (2.0 * g.dx());
    const double w = (j == 0 || j == ny + 1) ? 0.5 : 1.0;
    x0 += w * d * d * g.dy();
  }
  for (int i = 0; i <= nx + 1; ++i) {
    const double d = (4.0 * zeta(i, 1) - zeta(i, 2)) / (2.0 * g.dy());
    const double w = (i == 0 || i == nx + 1) ? 0.5 : 1.0;
    y0 += w * d * d * g.dx();
  }
  return {x0, y0};
}

EnergyRecord make_record(double t, const ScalarField& zeta, const DelayLine& line,
                         const EnergyWeights& weights, const LyapunovSpec& lyap,
                         const ScalarField& damping_region) {
  EnergyRecord r;
  r.t = t;
  const auto e = energy(zeta, line, weights);
  r.E_state = e.state;
  r.E_delay = e.delay;
  r.E_total = e.total;
  const ScalarField& lw = lyap.weight ? *lyap.weight : *weights.weight;
  const auto v = lyapunov(zeta, line, lyap.eta, lyap.sigma, lw, e.total);
  r.V_lyap = v.V;
  r.V1 = v.V1;
  r.V2 = v.V2;
  const auto f = boundary_fluxes(zeta);
  r.flux_x0 = f.x0;
  r.flux_y0 = f.y0;
  r.linf_state = zeta.max_abs();
  r.l2sq_state = 2.0 * e.state;
  r.damped_state = integrate_weighted(damping_region, zeta, 2);
  r.damped_delayed = integrate_weighted(damping_region, line.delayed(), 2);
  return r;
}

RateFit fit_decay_rate(std::span<const double> t, std::span<const double> E, double t_a,
                       double t_b) {
  if (t.size() != E.size()) throw Error("time and energy series differ in length");
  if (!(t_b > t_a)) throw Error("degenerate fit window");
  double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a || t[k] > t_b) continue;
    if (!(E[k] > 0.0)) throw Error("energy must be positive on the fit window");
    const double y = std::log(E[k]);
    n += 1.0;
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
  }
  if (n < 10.0) throw Error("fit window holds fewer than 10 samples");
  const double tm = st / n, ym = sy / n;
  const double var = stt / n - tm * tm;
  if (!(var > 0.0)) throw Error("degenerate fit window");
  // Centered sums for the slope keep exact exponentials exact to round-off.
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a || t[k] > t_b) continue;
    const double dt = t[k] - tm;
    sxx += dt * dt;
    sxy += dt * (std::log(E[k]) - ym);
  }
  const double slope = sxy / sxx;
  const double intercept = ym - slope * tm;
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a || t[k] > t_b) continue;
    const double r = std::log(E[k]) - (intercept + slope * t[k]);
    ss += r * r;
  }
  return {-slope, intercept, std::sqrt(ss / n)};
}

RateFit fit_decay_rate(const std::vector<EnergyRecord>& records,
                       std::optional<std::pair<double, double>> window) {
  if (records.empty()) throw Error("empty trajectory");
  std::vector<double> t, E;
  t.reserve(records.size());
  E.reserve(records.size());
  for (const auto& r : records) {
    t.push_back(r.t);
    E.push_back(r.E_total);
  }
  if (!window) {
    const double t0 = t.front(), t1 = t.back();
    window = {t0 + 0.4 * (t1 - t0), t1};
  }
  return fit_decay_rate(t, E, window->first, window->second);
}

ObservabilityResult observability_ratio(const std::vector<EnergyRecord>& records, double T) {
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    const auto& a = records[k - 1];
    const auto& b = records[k];
    if (b.t > T * (1.0 + 1e-12)) break;
    const double dt = b.t - a.t;
    lhs += 0.5 * dt * (a.l2sq_state + b.l2sq_state);
    const double ra = a.flux_x0 + a.flux_y0 + a.damped_state + a.damped_delayed;
    const double rb = b.flux_x0 + b.flux_y0 + b.damped_state + b.damped_delayed;
    rhs += 0.5 * dt * (ra + rb);
  }
  if (rhs == 0.0) {
    return {lhs, rhs, std::nullopt,
            lhs == 0.0 ? ObservabilityStatus::kUndefined : ObservabilityStatus::kViolation};
  }
  return {lhs, rhs, lhs / rhs, ObservabilityStatus::kOk};
}

double gn_ratio(const ScalarField& f) {
  const Norms n = norms(f);
  if (!(n.l2 > 0.0)) throw Error("Gagliardo-Nirenberg ratio of a zero field");
  const double h1 = std::sqrt(n.l2 * n.l2 + n.h1_semi * n.h1_semi);
  return n.l3 / (std::cbrt(h1) * std::pow(n.l2, 2.0 / 3.0));
}

double gn_estimate(const Grid2D& grid, std::span<const ScalarField> ensemble) {
  const double k = std::numbers::pi / grid.L();
  ScalarField mode = ScalarField::from_function(
      grid, [k](double x, double y) { return std::sin(k * x) * std::sin(k * y); });
  mode.zero_boundary();
  double best = gn_ratio(mode);
  for (const auto& f : ensemble) best = std::max(best, gn_ratio(f));
  return best;
}

}  // namespace zkdamper
