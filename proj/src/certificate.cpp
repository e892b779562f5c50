#include "zkdamper/certificate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "zkdamper/error.hpp"

namespace zkdamper {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void PhysicalParams::validate() const {
  if (!positive_finite(alpha)) throw ConfigError("alpha must be positive");
  if (!positive_finite(gamma)) throw ConfigError("gamma must be positive");
  if (!positive_finite(L)) throw ConfigError("L must be positive");
  if (!positive_finite(h)) throw ConfigError("h must be positive");
}

EtaSigma eta_sigma_zk(double xi, double L, double eta_fraction) {
  if (!(xi > 1.0)) throw InfeasibleError("xi must exceed 1");
  if (!positive_finite(L)) throw ConfigError("L must be positive");
  if (!(eta_fraction > 0.0 && eta_fraction < 1.0))
    throw ConfigError("eta fraction must lie in (0,1)");
  const double eta_max = (xi - 1.0) / (2.0 * L * (1.0 + 2.0 * xi));
  const double eta = eta_fraction * eta_max;
  const double sigma = xi - 1.0 - 2.0 * L * eta * (1.0 + 2.0 * xi);
  return {eta, sigma};
}

ThetaKappa theta_kappa_zk(const PhysicalParams& p, double xi, double eta, double sigma) {
  const double L = p.L;
  const double dispersive = 3.0 * p.alpha * eta / ((1.0 + 2.0 * eta * L) * L * L);
  const double delayed = sigma / (2.0 * p.h * (xi + sigma));
  const double theta = std::min(dispersive, delayed);
  const double kappa = 1.0 + std::max(2.0 * eta * L, sigma / xi);
  const double balance = 2.0 * p.alpha * eta / ((2.0 + 2.0 * eta * L) * L * L) - delayed;
  return {theta, kappa, balance};
}

Horizon horizon_zk(double theta, double xi, double kappa, double mu, double eps, double b_inf) {
  if (!(theta > 0.0)) throw InfeasibleError("theta must be positive");
  if (!(mu > 0.0 && mu < 1.0)) throw InfeasibleError("mu must lie in (0,1)");
  if (!(eps > 0.0 && mu + eps < 1.0)) throw InfeasibleError("need eps > 0 and mu + eps < 1");
  if (!(b_inf >= 0.0)) throw InfeasibleError("b_inf must be nonnegative");
  const double arg = 2.0 * xi * kappa / mu;
  if (!(arg > 0.0)) throw InfeasibleError("2 xi kappa / mu must be positive");
  const double T0 = std::log(arg) / (2.0 * theta) + 1.0;
  const double nu = std::log(1.0 / (mu + eps)) / T0;
  const double Tmin = -std::log(mu / 2.0) / nu + (2.0 * b_inf / nu + 1.0) * T0;
  return {T0, nu, Tmin};
}

XiInterval xi_interval_mu(double mu1, double mu2, double h) {
  return {h * mu2, h * (2.0 * mu1 - mu2)};
}

StabilityCertificate certify_zk(const PhysicalParams& params, const ZkCertInputs& in) {
  params.validate();
  StabilityCertificate cert;
  cert.system = "zk";
  cert.xi = in.xi;
  cert.assumed_constants["mu"] = in.mu;
  cert.assumed_constants["eps"] = in.eps;
  cert.assumed_constants["b_inf"] = in.b_inf;
  cert.assumed_constants["eta_fraction"] = in.eta_fraction;

  auto& diag = cert.diagnostics;
  if (!(in.xi > 1.0)) diag.push_back("xi must exceed 1");
  if (!(in.mu > 0.0 && in.mu < 1.0)) diag.push_back("mu must lie in (0,1)");
  if (!(in.eps > 0.0)) diag.push_back("eps must be positive");
  if (!(in.mu + in.eps < 1.0)) diag.push_back("mu + eps must be below 1");
  if (!(in.b_inf >= 0.0)) diag.push_back("b_inf must be nonnegative");
  if (!(in.eta_fraction > 0.0 && in.eta_fraction < 1.0))
    diag.push_back("eta fraction must lie in (0,1)");
  if (!diag.empty()) return cert;

  const auto es = eta_sigma_zk(in.xi, params.L, in.eta_fraction);
  const auto tk = theta_kappa_zk(params, in.xi, es.eta, es.sigma);
  cert.eta = es.eta;
  cert.sigma = es.sigma;
  cert.theta = tk.theta;
  cert.kappa = tk.kappa;
  cert.kappa_alt = 1.0 + std::max(2.0 * es.eta * params.L, es.sigma);
  diag.push_back(fmt::format("balance residual {:.6e} (informational)", tk.balance_residual));
  if (!(tk.theta > 0.0)) {
    diag.push_back("theta is not positive");
    return cert;
  }
  const auto hz = horizon_zk(tk.theta, in.xi, tk.kappa, in.mu, in.eps, in.b_inf);
  cert.T0 = hz.T0;
  cert.nu = hz.nu;
  cert.Tmin = hz.Tmin;
  cert.feasible = true;
  return cert;
}

StabilityCertificate certify_mu(const PhysicalParams& params, const MuCertInputs& in) {
  params.validate();
  StabilityCertificate cert;
  cert.system = "mu";
  cert.xi = in.xi;
  cert.assumed_constants["mu1"] = in.mu1;
  cert.assumed_constants["mu2"] = in.mu2;
  cert.assumed_constants["gn_C"] = in.gn_C;
  cert.assumed_constants["r"] = in.r;

  auto& diag = cert.diagnostics;
  if (!(in.mu1 > in.mu2 && in.mu2 > 0.0)) diag.push_back("need mu1 > mu2 > 0");
  if (!(in.gn_C > 0.0)) diag.push_back("gn_C must be positive");
  if (!(in.r > 0.0)) diag.push_back("r must be positive");
  const auto iv = xi_interval_mu(in.mu1, in.mu2, params.h);
  if (!iv.contains(in.xi))
    diag.push_back(fmt::format("xi = {} outside admissible interval ({}, {})", in.xi, iv.lo, iv.hi));
  if (!diag.empty()) return cert;

  const double L = params.L;
  const double h = params.h;
  const double r_max = std::pow(216.0 * std::pow(params.alpha, 3), 0.25) /
                       (in.gn_C * std::pow(L, 2.5));
  cert.r_max = r_max;

  const double sigma_max = (2.0 * h / in.xi) * (in.mu1 - in.mu2 / 2.0 - in.xi / (2.0 * h));
  const double sigma = 0.5 * sigma_max;
  const double eta_max = std::min(
      (in.xi / h - in.mu2) / (2.0 * L * in.mu2),
      (in.mu1 - in.mu2 / 2.0 - (in.xi / (2.0 * h)) * (1.0 + sigma)) /
          (2.0 * L * in.mu1 + L * in.mu2));
  const double eta = 0.5 * eta_max;
  cert.sigma = sigma;
  cert.eta = eta;
  cert.kappa = 1.0 + std::max(2.0 * eta * L, sigma);
  cert.kappa_alt = 1.0 + std::max(2.0 * eta * L, sigma / in.xi);

  const double bracket = 3.0 * params.alpha -
                         0.5 * std::pow(in.gn_C, 4.0 / 3.0) * std::pow(in.r, 4.0 / 3.0) *
                             std::pow(L, 10.0 / 3.0);
  const double dispersive = eta / ((1.0 + 2.0 * eta * L) * L * L) * bracket;
  const double delayed = in.xi * sigma / (2.0 * h * (in.xi + sigma * in.xi));
  cert.theta = std::min(dispersive, delayed);

  if (!(sigma > 0.0)) diag.push_back("sigma upper bound is not positive");
  if (!(eta > 0.0)) diag.push_back("eta upper bound is not positive");
  if (!(bracket > 0.0)) diag.push_back("smallness bracket 3 alpha - C^{4/3} r^{4/3} L^{10/3}/2 is not positive");
  if (!(in.r < r_max)) diag.push_back(fmt::format("r = {} exceeds r_max = {}", in.r, r_max));
  cert.feasible = diag.empty() && cert.theta > 0.0;
  return cert;
}

}  // namespace zkdamper
