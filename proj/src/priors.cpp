#include "oivar/priors.hpp"

#include <cmath>
#include <string>

#include "oivar/errors.hpp"

namespace oivar {

namespace {
constexpr int kArOrder = 4;
constexpr int kMinArLength = 12;
}  // namespace

B0Prior B0Prior::unrestricted(int n) {
  return {Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Ones(n, n)};
}

B0Prior B0Prior::lower_triangular(int n) {
  return {Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Ones(n, n)};
}

SvPrior SvPrior::defaults(int n, double phi0, double vphi, double nu, double mean_omega2) {
  SvPrior out;
  out.phi0 = Eigen::VectorXd::Constant(n, phi0);
  out.vphi = Eigen::VectorXd::Constant(n, vphi);
  out.nu = Eigen::VectorXd::Constant(n, nu);
  out.S = Eigen::VectorXd::Constant(n, mean_omega2 * (nu - 1.0));
  return out;
}

double ar_residual_variance(const Eigen::VectorXd& series, int order) {
  const Eigen::Index len = series.size();
  if (len < kMinArLength || len <= 2 * (order + 1)) {
    throw InputError("series too short for an AR(" + std::to_string(order) + ") fit");
  }
  if (!series.allFinite()) throw InputError("series contains non-finite values");
  const Eigen::Index rows = len - order;
  Eigen::MatrixXd Z(rows, order + 1);
  Z.col(0).setOnes();
  for (int l = 1; l <= order; ++l) Z.col(l) = series.segment(order - l, rows);
  const Eigen::VectorXd y = series.tail(rows);
  const Eigen::VectorXd beta = Z.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - Z * beta;
  const double mean = resid.mean();
  const double var = (resid.array() - mean).square().sum() / static_cast<double>(rows - 1);
  if (!(var > 1e-300) || !std::isfinite(var)) {
    throw InputError("degenerate series: AR residual variance is zero");
  }
  return var;
}

MinnesotaConstants compute_c_constants(const Eigen::MatrixXd& series, int p) {
  const int n = static_cast<int>(series.cols());
  MinnesotaConstants out;
  out.s2.resize(n);
  for (int r = 0; r < n; ++r) {
    try {
      out.s2[r] = ar_residual_variance(series.col(r), kArOrder);
    } catch (const InputError& e) {
      throw InputError("variable " + std::to_string(r) + ": " + e.what());
    }
  }
  out.C = Eigen::MatrixXd::Ones(n * p + 1, n);
  for (int i = 0; i < n; ++i) {
    for (int l = 1; l <= p; ++l) {
      const double l2 = static_cast<double>(l) * l;
      for (int j = 0; j < n; ++j) {
        out.C(1 + (l - 1) * n + j, i) = (i == j) ? 1.0 / l2 : out.s2[i] / (l2 * out.s2[j]);
      }
    }
  }
  return out;
}

Eigen::MatrixXd prior_mean_m(const std::vector<bool>& level_flags, int p) {
  const int n = static_cast<int>(level_flags.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n * p + 1, n);
  for (int i = 0; i < n; ++i)
    if (level_flags[static_cast<std::size_t>(i)]) m(1 + i, i) = 1.0;
  return m;
}

BoolMatrix own_lag_mask(int n, int p) {
  BoolMatrix mask = BoolMatrix::Constant(n * p + 1, n, false);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < p; ++l) mask(1 + l * n + i, i) = true;
  return mask;
}

MinnesotaHsConfig make_minnesota_config(const Eigen::MatrixXd& series, int p, const std::vector<bool>& level_flags,
                                        double intercept_var) {
  if (static_cast<Eigen::Index>(level_flags.size()) != series.cols()) {
    throw InputError("level flags do not match the number of variables");
  }
  auto constants = compute_c_constants(series, p);
  MinnesotaHsConfig cfg;
  cfg.n = static_cast<int>(series.cols());
  cfg.p = p;
  cfg.m = prior_mean_m(level_flags, p);
  cfg.C = std::move(constants.C);
  cfg.s2 = std::move(constants.s2);
  cfg.own_lag_mask = own_lag_mask(cfg.n, p);
  cfg.intercept_var = intercept_var;
  return cfg;
}

Eigen::VectorXd conditional_coef_variance(const MinnesotaHsConfig& cfg, const HorseshoeState& hs, int equation) {
  const Eigen::Index k = cfg.C.rows();
  Eigen::VectorXd v(k);
  v[0] = cfg.intercept_var;
  for (Eigen::Index r = 1; r < k; ++r) {
    const double kappa = cfg.own_lag_mask(r, equation) ? hs.kappa1 : hs.kappa2;
    v[r] = kappa * hs.psi(r, equation) * cfg.C(r, equation);
  }
  return v;
}

HorseshoeState init_horseshoe(int n, int p, Rng& rng, HorseshoeInit mode) {
  const int k = n * p + 1;
  HorseshoeState hs;
  hs.psi = Eigen::MatrixXd::Ones(k, n);
  hs.z_psi = Eigen::MatrixXd::Ones(k, n);
  if (mode == HorseshoeInit::deterministic) return hs;
  // psi | z ~ IG(1/2, 1/z), z ~ IG(1/2, 1) gives sqrt(psi) ~ C+(0, 1).
  for (int i = 0; i < n; ++i) {
    for (int r = 1; r < k; ++r) {
      hs.z_psi(r, i) = rng.inverse_gamma(0.5, 1.0);
      hs.psi(r, i) = rng.inverse_gamma(0.5, 1.0 / hs.z_psi(r, i));
    }
  }
  hs.z_k1 = rng.inverse_gamma(0.5, 1.0);
  hs.kappa1 = rng.inverse_gamma(0.5, 1.0 / hs.z_k1);
  hs.z_k2 = rng.inverse_gamma(0.5, 1.0);
  hs.kappa2 = rng.inverse_gamma(0.5, 1.0 / hs.z_k2);
  return hs;
}

void apply_overrides(PriorSet& priors, const PriorOverrides& o) {
  if (o.intercept_var) {
    if (!(*o.intercept_var > 0.0)) throw InputError("intercept prior variance must be positive");
    priors.coef.intercept_var = *o.intercept_var;
  }
  if (o.b0_var) {
    if (!(*o.b0_var > 0.0)) throw InputError("B0 prior variance must be positive");
    priors.b0.var.setConstant(*o.b0_var);
  }
  if (o.phi0) priors.sv.phi0.setConstant(*o.phi0);
  if (o.vphi) {
    if (!(*o.vphi > 0.0)) throw InputError("phi prior variance must be positive");
    priors.sv.vphi.setConstant(*o.vphi);
  }
  if (o.nu || o.omega2_mean) {
    const double nu = o.nu.value_or(priors.sv.nu[0]);
    if (!(nu > 1.0)) throw InputError("omega2 prior shape must exceed 1");
    const double mean = o.omega2_mean.value_or(priors.sv.S[0] / (priors.sv.nu[0] - 1.0));
    if (!(mean > 0.0)) throw InputError("omega2 prior mean must be positive");
    priors.sv.nu.setConstant(nu);
    priors.sv.S.setConstant(mean * (nu - 1.0));
  }
}

}  // namespace oivar
