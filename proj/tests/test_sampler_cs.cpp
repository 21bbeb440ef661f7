#include <cmath>

#include "doctest.h"
#include "oivar/dgp.hpp"
#include "oivar/sampler.hpp"
#include "oivar/summary.hpp"
#include "support/oracles.hpp"

using namespace oivar;

namespace {

EstimationData ar_data(int n, int p, int T, std::uint64_t seed) {
  Rng rng(seed, 7);
  Eigen::MatrixXd series(T + p, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double x = 0.0;
    for (Eigen::Index t = 0; t < T + p; ++t) {
      x = 0.5 * x + rng.normal();
      series(t, j) = x;
    }
  }
  return make_estimation_data(series, p);
}

}  // namespace

TEST_CASE("triangular B0 rows: conjugate regression") {
  Rng rng(13);
  const int T = 30;
  Eigen::MatrixXd U(T, 3);
  for (Eigen::Index i = 0; i < U.size(); ++i) U.data()[i] = rng.normal();
  Eigen::VectorXd h(T);
  for (int t = 0; t < T; ++t) h[t] = 0.5 * rng.normal();
  const int row = 2;
  // u_2t = -b_20 u_0t - b_21 u_1t + e_t, e_t ~ N(0, exp(h_t)), b ~ N(0, I)
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(2, 2);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(2);
  for (int t = 0; t < T; ++t) {
    const Eigen::Vector2d z(-U(t, 0), -U(t, 1));
    K += std::exp(-h[t]) * z * z.transpose();
    r += std::exp(-h[t]) * z * U(t, row);
  }
  const Eigen::MatrixXd cov = K.inverse();
  const Eigen::VectorXd mean = cov * r;
  std::vector<double> x0, x1;
  for (int it = 0; it < 40000; ++it) {
    const Eigen::VectorXd b = sample_b0_lower_row(U, h, row, Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), rng);
    REQUIRE(b.size() == 2);
    x0.push_back(b[0]);
    x1.push_back(b[1]);
  }
  CHECK(oracle::ks_pvalue(oracle::ks_distance(x0, [&](double v) { return oracle::normal_cdf(v, mean[0], std::sqrt(cov(0, 0))); }), x0.size()) > 0.001);
  CHECK(oracle::ks_pvalue(oracle::ks_distance(x1, [&](double v) { return oracle::normal_cdf(v, mean[1], std::sqrt(cov(1, 1))); }), x1.size()) > 0.001);

  CHECK(sample_b0_lower_row(U, h, 0, Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), rng).size() == 0);

  // no likelihood information: prior draws
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(T, 3);
  std::vector<double> pr;
  for (int it = 0; it < 20000; ++it) pr.push_back(sample_b0_lower_row(Z, h, 1, Eigen::Vector3d::Zero(), Eigen::Vector3d::Ones(), rng)[0]);
  CHECK(oracle::ks_pvalue(oracle::ks_distance(pr, [](double v) { return oracle::normal_cdf(v, 0.0, 1.0); }), pr.size()) > 0.001);
}

TEST_CASE("triangular B0 recovers a known impact coefficient") {
  Rng rng(14);
  const int T = 2000;
  Eigen::MatrixXd U(T, 2);
  for (int t = 0; t < T; ++t) {
    U(t, 0) = rng.normal();
    U(t, 1) = rng.normal() - 0.8 * U(t, 0);  // B0 u = eps with b_10 = 0.8
  }
  const Eigen::VectorXd h = Eigen::VectorXd::Zero(T);
  std::vector<double> x;
  for (int it = 0; it < 4000; ++it) x.push_back(sample_b0_lower_row(U, h, 1, Eigen::Vector2d::Zero(), Eigen::Vector2d::Ones(), rng)[0]);
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double sd = 0.0;
  for (double v : x) sd += (v - m) * (v - m);
  sd = std::sqrt(sd / static_cast<double>(x.size() - 1));
  CHECK(std::abs(m - 0.8) < 3.0 * sd);
}

TEST_CASE("shared coefficient step is identical under both structures") {
  const EstimationData data = ar_data(3, 1, 20, 15);
  const Eigen::MatrixXd series = Eigen::MatrixXd::Random(21, 3);
  const PriorSet oi = default_priors(series, 1, std::vector<bool>(3, false), ImpactStructure::unrestricted);
  const PriorSet cs = default_priors(series, 1, std::vector<bool>(3, false), ImpactStructure::unit_lower_triangular);
  ChainState a = initial_state(data, oi, 15);
  ChainState b = initial_state(data, cs, 15);
  a.params.A = b.params.A = oracle::random_params(3, 1, 4).A;
  for (int i = 0; i < 3; ++i) {
    const auto ca = var_coef_conditional(data, oi, a, i);
    const auto cb = var_coef_conditional(data, cs, b, i);
    CHECK(ca.precision == cb.precision);
    CHECK(ca.rhs == cb.rhs);
  }
}

TEST_CASE("triangular step leaves a single variable untouched") {
  const EstimationData data = ar_data(1, 1, 30, 20);
  const PriorSet pri = default_priors(Eigen::MatrixXd::Random(31, 1), 1, {false}, ImpactStructure::unit_lower_triangular);
  ChainState st = initial_state(data, pri, 20);
  sample_b0_lower(data, pri, st);
  CHECK(st.params.B0(0, 0) == 1.0);
}

TEST_CASE("triangular step keeps the unit lower structure") {
  const EstimationData data = ar_data(4, 1, 40, 21);
  PriorSet pri;
  pri.coef = make_minnesota_config(Eigen::MatrixXd::Random(41, 4), 1, std::vector<bool>(4, false));
  pri.b0 = B0Prior::lower_triangular(4);
  pri.sv = SvPrior::defaults(4);
  ChainState st = initial_state(data, pri, 21);
  st.params.B0 = oracle::random_impact(4, 3);
  SamplerOptions opts;
  opts.structure = ImpactStructure::unit_lower_triangular;
  for (int it = 0; it < 5; ++it) {
    gibbs_sweep(data, pri, opts, st);
    CHECK(st.params.B0.diagonal().isOnes());
    CHECK(st.params.B0.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0));
    CHECK(st.params.B0.determinant() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("triangular prior defaults") {
  const B0Prior b = B0Prior::lower_triangular(3);
  CHECK(b.mean.isZero(0.0));
  CHECK(b.var.isOnes());
}

TEST_CASE("triangular posterior recovers a simulated impact matrix") {
  // VAR(1) with a triangular B0 and constant volatility
  const int n = 3, T = 600;
  Rng rng(22);
  Eigen::MatrixXd B0 = Eigen::MatrixXd::Identity(n, n);
  B0(1, 0) = 0.8;
  B0(2, 0) = -0.5;
  B0(2, 1) = 0.3;
  const Eigen::MatrixXd Binv = B0.inverse();
  Eigen::MatrixXd series = Eigen::MatrixXd::Zero(T + 1, n);
  for (int t = 1; t <= T; ++t) {
    series.row(t) = 0.4 * series.row(t - 1) + (Binv * rng.normal_vector(n)).transpose();
  }
  const EstimationData data = make_estimation_data(series, 1);
  const PriorSet pri = default_priors(series, 1, std::vector<bool>(n, false), ImpactStructure::unit_lower_triangular);
  McmcConfig cfg;
  cfg.burn = 300;
  cfg.draws = 1000;
  cfg.seed = 22;
  cfg.keep_paths = false;
  const PosteriorSample post = run_mcmc_cs(data, pri, cfg);
  const PosteriorSummary s = summarize(post, {"a", "b", "c"});
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      INFO("b" << i << j << " mean " << s.B0_mean(i, j) << " truth " << B0(i, j));
      CHECK(s.B0_q05(i, j) - 0.05 < B0(i, j));
      CHECK(B0(i, j) < s.B0_q95(i, j) + 0.05);
    }
}

