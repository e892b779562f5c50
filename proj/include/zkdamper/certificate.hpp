#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zkdamper {

// Coefficients of  zeta_t + alpha zeta_xxx + gamma zeta_xyy + zeta zeta_x = 0
// on (0,L)^2 with delay h.
struct PhysicalParams {
  double alpha = 1.0;
  double gamma = 1.0;
  double L = 1.0;
  double h = 1.0;

  // Throws ConfigError unless every entry is positive and finite.
  void validate() const;
};

struct EtaSigma {
  double eta;
  double sigma;
};

struct ThetaKappa {
  double theta;
  double kappa;
  // 2 alpha eta / ((2 + 2 eta L) L^2) - sigma / (2 h (xi + sigma)); zero when
  // the "balanced" choice of constants is met. Reported, never enforced.
  double balance_residual;
};

struct Horizon {
  double T0;
  double nu;
  double Tmin;
};

// Open interval (lo, hi); empty when lo >= hi.
struct XiInterval {
  double lo;
  double hi;

  bool empty() const { return !(lo < hi); }
  bool contains(double xi) const { return lo < xi && xi < hi; }
};

// eta = fraction * (xi-1)/(2L(1+2xi)),  sigma = xi - 1 - 2 L eta (1 + 2 xi).
// Throws InfeasibleError when xi <= 1 (the eta-interval is empty).
EtaSigma eta_sigma_zk(double xi, double L, double eta_fraction = 0.5);

// theta = min{3 alpha eta/((1+2 eta L) L^2), sigma/(2h(xi+sigma))},
// kappa = 1 + max{2 eta L, sigma/xi}.
ThetaKappa theta_kappa_zk(const PhysicalParams& params, double xi, double eta, double sigma);

// T0 = ln(2 xi kappa/mu)/(2 theta) + 1, nu = ln(1/(mu+eps))/T0,
// Tmin = -ln(mu/2)/nu + (2 b_inf/nu + 1) T0.
Horizon horizon_zk(double theta, double xi, double kappa, double mu, double eps, double b_inf);

// Admissible weights for the mu-system: h mu2 < xi < h (2 mu1 - mu2).
XiInterval xi_interval_mu(double mu1, double mu2, double h);

struct ZkCertInputs {
  double xi = 2.0;
  double mu = 0.5;
  double eps = 0.1;
  double b_inf = 0.0;
  // Position of eta inside (0, (xi-1)/(2L(1+2xi))) as a fraction in (0,1).
  double eta_fraction = 0.5;
};

struct MuCertInputs {
  double mu1 = 1.0;
  double mu2 = 0.5;
  double xi = 1.0;
  // Gagliardo---Nirenberg constant; the analysis leaves it unspecified.
  double gn_C = 1.0;
  // Radius of the data ball the certificate should cover.
  double r = 0.5;
};

struct StabilityCertificate {
  std::string system;  // "zk" or "mu"
  double xi = 0.0;
  double eta = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  double kappa = 0.0;
  // The other theorem's overshoot formula (sigma vs sigma/xi), for comparison.
  double kappa_alt = 0.0;
  std::optional<double> T0;
  std::optional<double> nu;
  std::optional<double> Tmin;
  std::optional<double> r_max;
  bool feasible = false;
  std::map<std::string, double> assumed_constants;
  std::vector<std::string> diagnostics;
};

// Certificate for the (a,b)-system. Never throws for infeasible inputs; the
// failure is recorded in `feasible` and `diagnostics`.
StabilityCertificate certify_zk(const PhysicalParams& params, const ZkCertInputs& in);

// Certificate for the mu-system, with sigma and eta at half their admissible
// upper bounds and theta at the smaller of its two bounds.
StabilityCertificate certify_mu(const PhysicalParams& params, const MuCertInputs& in);

}  // namespace zkdamper
