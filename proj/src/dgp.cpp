#include "oivar/dgp.hpp"

#include <cmath>
#include <string>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

constexpr int kBurnIn = 100;

Dataset wrap_series(const Eigen::MatrixXd& series) {
  const int n = static_cast<int>(series.cols());
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("y" + std::to_string(i + 1));
  std::vector<std::string> dates;
  for (Eigen::Index t = 0; t < series.rows(); ++t) dates.push_back(std::to_string(t + 1));
  return make_dataset(std::move(names), std::move(dates), series,
                      std::vector<TransformCode>(static_cast<std::size_t>(n), TransformCode::none));
}

SimulatedData finish(VarSvParams truth, int T, int p, bool sv_on, Rng& rng) {
  SimulatedData out;
  Eigen::MatrixXd series;
  Eigen::MatrixXd h;
  simulate_var_sv(truth, T, sv_on, rng, series, h);
  out.data = wrap_series(series);
  out.truth = std::move(truth);
  out.h_truth.h = std::move(h);
  out.p = p;
  return out;
}

}  // namespace

VarSvParams draw_section5_params(Rng& rng, int n, int p, int max_tries) {
  if (n < 1 || p < 1) throw InputError("dgp: n and p must be positive");
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    VarSvParams par = VarSvParams::zeros(n, p);
    for (int i = 0; i < n; ++i) par.A(0, i) = rng.uniform(-10.0, 10.0);
    for (int l = 1; l <= p; ++l) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          double v;
          if (l == 1) {
            v = (i == j) ? rng.uniform(0.0, 0.5) : rng.uniform(-0.2, 0.2);
          } else {
            v = rng.normal(0.0, 0.1 / l);
          }
          // equation i, lag l of variable j
          par.A(1 + (l - 1) * n + j, i) = v;
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) par.B0(i, j) = (i == j) ? rng.uniform(0.5, 2.0) : rng.normal();
    }
    par.phi.setConstant(0.95);
    par.omega2.setConstant(0.05);
    if (companion_spectral_radius(par.A, n, p) < 1.0 && std::abs(par.B0.determinant()) > 1e-8) return par;
  }
  throw InputError("dgp: no stationary draw after " + std::to_string(max_tries) + " attempts");
}

void simulate_var_sv(const VarSvParams& params, int T, bool sv_on, Rng& rng, Eigen::MatrixXd& series,
                     Eigen::MatrixXd& h) {
  validate_params(params);
  const int n = params.n();
  const int p = params.p();
  if (companion_spectral_radius(params.A, n, p) >= 1.0) throw InputError("dgp: explosive VAR");

  Eigen::MatrixXd sum_lags = Eigen::MatrixXd::Identity(n, n);
  for (int l = 1; l <= p; ++l) sum_lags -= params.lag_matrix(l);
  const Eigen::VectorXd mu = sum_lags.partialPivLu().solve(params.intercepts());
  const Eigen::MatrixXd B0inv = params.B0.inverse();

  const int total = kBurnIn + p + T;
  Eigen::MatrixXd y(total + p, n);
  for (int r = 0; r < p; ++r) y.row(r) = mu.transpose();
  Eigen::RowVectorXd hcur(n);
  for (int i = 0; i < n; ++i) {
    hcur[i] = sv_on ? rng.normal(0.0, std::sqrt(params.omega2[i] / (1.0 - params.phi[i] * params.phi[i]))) : 0.0;
  }
  h.resize(T, n);
  for (int t = p; t < total + p; ++t) {
    if (t > p && sv_on) {
      for (int i = 0; i < n; ++i) hcur[i] = params.phi[i] * hcur[i] + rng.normal(0.0, std::sqrt(params.omega2[i]));
    }
    Eigen::VectorXd eps(n);
    for (int i = 0; i < n; ++i) eps[i] = std::exp(0.5 * hcur[i]) * rng.normal();
    const Eigen::RowVectorXd x = regressor_row(y.topRows(t), p);
    y.row(t) = x * params.A + (B0inv * eps).transpose();
    const int keep = t - p - kBurnIn - p;
    if (keep >= 0) h.row(keep) = hcur;
  }
  series = y.bottomRows(p + T);
}

SimulatedData generate_section5(std::uint64_t seed, int n, int T, int p, bool sv_on) {
  Rng rng(seed, 5);
  VarSvParams truth = draw_section5_params(rng, n, p);
  return finish(std::move(truth), T, p, sv_on, rng);
}

Eigen::MatrixXd section61_impact() {
  Eigen::MatrixXd B0(3, 3);
  B0 << 1.0, -0.8, -0.8,
        0.8, 1.0, -0.8,
        0.8, 0.8, 1.0;
  return B0;
}

SimulatedData generate_section61(std::uint64_t seed, bool sv_on) {
  Rng rng(seed, 61);
  VarSvParams truth = draw_section5_params(rng, 3, 4);
  truth.B0 = section61_impact();
  return finish(std::move(truth), 500, 4, sv_on, rng);
}

Eigen::VectorXd ordering_variance_demo(int n, long reps, Rng& rng) {
  if (reps < 1) throw InputError("ordering demo: reps must be at least 1");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u(n);
  for (long r = 0; r < reps; ++r) {
    for (int i = 0; i < n; ++i) {
      // B0 u = eps with unit diagonal: u_i = eps_i - sum_{j<i} b_ij u_j
      double v = rng.normal();
      for (int j = 0; j < i; ++j) v -= rng.normal() * u[j];
      u[i] = v;
      acc[i] += v * v;
    }
  }
  return acc / static_cast<double>(reps);
}

}  // namespace oivar
