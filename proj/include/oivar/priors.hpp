#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "oivar/random.hpp"

namespace oivar {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Minnesota-type horseshoe: alpha_{r,i} | kappa, psi ~ N(m_{r,i}, kappa psi_{r,i} C_{r,i})
// for the non-intercept rows r >= 1 of the k x n coefficient matrix.
struct MinnesotaHsConfig {
  Eigen::MatrixXd m;      // k x n prior means
  Eigen::MatrixXd C;      // k x n Minnesota constants; row 0 unused
  Eigen::VectorXd s2;     // AR(4) residual variances per variable
  BoolMatrix own_lag_mask;  // k x n, true on own-lag coefficients
  double intercept_var = 100.0;
  int n = 1;
  int p = 1;
};

struct HorseshoeState {
  Eigen::MatrixXd psi;    // k x n local variances; row 0 unused
  double kappa1 = 1.0;    // own lags
  double kappa2 = 1.0;    // other lags
  Eigen::MatrixXd z_psi;  // k x n latent auxiliaries; row 0 unused
  double z_k1 = 1.0;
  double z_k2 = 1.0;
};

// b_i ~ N(mean.row(i)', diag(var.row(i))).
struct B0Prior {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd var;

  static B0Prior unrestricted(int n);
  static B0Prior lower_triangular(int n);
};

// phi_i ~ N(phi0_i, vphi_i) 1(|phi_i| < 1), omega2_i ~ IG(nu_i, S_i).
struct SvPrior {
  Eigen::VectorXd phi0;
  Eigen::VectorXd vphi;
  Eigen::VectorXd nu;
  Eigen::VectorXd S;

  static SvPrior defaults(int n, double phi0 = 0.95, double vphi = 0.01, double nu = 3.0, double mean_omega2 = 0.1);
};

struct PriorSet {
  MinnesotaHsConfig coef;
  B0Prior b0;
  SvPrior sv;
};

struct MinnesotaConstants {
  Eigen::MatrixXd C;
  Eigen::VectorXd s2;
};

// Least-squares AR(4) with intercept on each column of `series`; returns the
// residual variances and the k x n constants 1/l^2 (own) or s_i^2/(l^2 s_j^2).
MinnesotaConstants compute_c_constants(const Eigen::MatrixXd& series, int p);

// Residual sample variance of a least-squares AR(order) fit with intercept.
double ar_residual_variance(const Eigen::VectorXd& series, int order);

Eigen::MatrixXd prior_mean_m(const std::vector<bool>& level_flags, int p);
BoolMatrix own_lag_mask(int n, int p);

MinnesotaHsConfig make_minnesota_config(const Eigen::MatrixXd& series, int p, const std::vector<bool>& level_flags,
                                        double intercept_var = 100.0);

// Diagonal of V_{alpha_i}: intercept variance, then kappa * psi * C.
Eigen::VectorXd conditional_coef_variance(const MinnesotaHsConfig& cfg, const HorseshoeState& hs, int equation);

// Replacements for the default hyperparameters; unset fields keep the defaults.
struct PriorOverrides {
  std::optional<double> intercept_var;
  std::optional<double> b0_var;
  std::optional<double> phi0;
  std::optional<double> vphi;
  std::optional<double> nu;
  std::optional<double> omega2_mean;  // prior mean S / (nu - 1)
};

void apply_overrides(PriorSet& priors, const PriorOverrides& o);

enum class HorseshoeInit { deterministic, prior };

HorseshoeState init_horseshoe(int n, int p, Rng& rng, HorseshoeInit mode = HorseshoeInit::deterministic);

}  // namespace oivar
