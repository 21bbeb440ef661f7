#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oivar/errors.hpp"
#include "oivar/log_volatility.hpp"
#include "support/oracles.hpp"

using namespace oivar;

namespace {

Eigen::MatrixXd dense(const Tridiagonal& K) {
  const Eigen::Index T = K.diag.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(T, T);
  M.diagonal() = K.diag;
  for (Eigen::Index t = 0; t + 1 < T; ++t) M(t, t + 1) = M(t + 1, t) = K.off[t];
  return M;
}

// AR(1) precision built entry by entry from the joint density of h_1..h_T.
Eigen::MatrixXd dense_ar1_precision(int T, double phi, double w) {
  // h = R^{-1} e with e ~ N(0, diag(w / (1 - phi^2), w, ..., w)),
  // R unit lower bidiagonal with -phi below the diagonal.
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(T, T);
  for (int t = 1; t < T; ++t) R(t, t - 1) = -phi;
  Eigen::VectorXd iv = Eigen::VectorXd::Constant(T, 1.0 / w);
  iv[0] = (1.0 - phi * phi) / w;
  return R.transpose() * iv.asDiagonal() * R;
}

}  // namespace

TEST_CASE("mixture approximates the log chi-square(1) distribution") {
  double worst = 0.0;
  for (double x = -20.0; x <= 5.0; x += 0.01) worst = std::max(worst, std::abs(KscMixture::cdf(x) - oracle::log_chisq1_cdf(x)));
  CHECK(worst < 0.01);
  double total = 0.0;
  for (double p : KscMixture::prob) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("AR(1) prior precision") {
  for (int T : {1, 2, 5}) {
    const auto K = ar1_prior_precision(T, 0.7, 0.3);
    CHECK((dense(K) - dense_ar1_precision(T, 0.7, 0.3)).norm() < 1e-12);
  }
  CHECK_THROWS_AS(ar1_prior_precision(3, 1.0, 0.1), InputError);
}

TEST_CASE("banded solver matches a dense solve at T = 5") {
  Rng rng(8);
  Tridiagonal K = ar1_prior_precision(5, 0.9, 0.2);
  for (Eigen::Index t = 0; t < 5; ++t) K.diag[t] += 1.0 / (0.5 + rng.uniform());
  const Eigen::VectorXd b = rng.normal_vector(5);
  const Eigen::VectorXd x = BandedCholesky(K).solve(b);
  const Eigen::VectorXd ref = dense(K).fullPivLu().solve(b);
  CHECK((x - ref).cwiseAbs().maxCoeff() < 1e-10);
  const Eigen::MatrixXd L = dense(K).llt().matrixL();
  const Eigen::VectorXd u = BandedCholesky(K).solve_upper(b);
  CHECK((L.transpose() * u - b).norm() < 1e-10);
}

TEST_CASE("tridiagonal sampler has the right mean and covariance") {
  Rng rng(9);
  Tridiagonal K = ar1_prior_precision(4, 0.5, 0.4);
  K.diag.array() += 0.7;
  const Eigen::VectorXd rhs = Eigen::Vector4d(1.0, -2.0, 0.5, 0.0);
  const Eigen::MatrixXd Sigma = dense(K).inverse();
  const Eigen::VectorXd mu = Sigma * rhs;
  const int reps = 200000;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(4);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(4, 4);
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd x = sample_tridiagonal_gaussian(K, rhs, rng);
    m += x;
    S += (x - mu) * (x - mu).transpose();
  }
  m /= reps;
  S /= reps;
  for (int i = 0; i < 4; ++i) CHECK(std::abs(m[i] - mu[i]) < 5.0 * std::sqrt(Sigma(i, i) / reps));
  CHECK((S - Sigma).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("indicator probabilities follow Bayes rule over the components") {
  Rng rng(10);
  const Eigen::VectorXd ystar = Eigen::VectorXd::Constant(1, -3.0);
  const Eigen::VectorXd hv = Eigen::VectorXd::Constant(1, 0.4);
  std::array<double, 7> post{};
  double tot = 0.0;
  for (int j = 0; j < 7; ++j) {
    const double d = ystar[0] - hv[0] - KscMixture::mean[static_cast<std::size_t>(j)];
    const double v = KscMixture::var[static_cast<std::size_t>(j)];
    post[static_cast<std::size_t>(j)] = KscMixture::prob[static_cast<std::size_t>(j)] * std::exp(-0.5 * d * d / v) / std::sqrt(v);
    tot += post[static_cast<std::size_t>(j)];
  }
  std::array<int, 7> count{};
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) ++count[static_cast<std::size_t>(sample_mixture_indicators(ystar, hv, rng)[0])];
  for (int j = 0; j < 7; ++j) {
    const double p = post[static_cast<std::size_t>(j)] / tot;
    CHECK(std::abs(count[static_cast<std::size_t>(j)] / double(reps) - p) < 5.0 * std::sqrt(p * (1 - p) / reps) + 1e-12);
  }
}

TEST_CASE("log-volatility conditional is the Gaussian posterior of the linear model") {
  // y*_t = h_t + m_{s_t} + N(0, v_{s_t}) with the AR(1) prior on h
  Rng rng(11);
  const int T = 6;
  const Eigen::VectorXd ystar = rng.normal_vector(T);
  Eigen::VectorXi s(T);
  s << 0, 3, 4, 6, 5, 1;
  const auto cond = log_vol_conditional(ystar, s, 0.8, 0.15);
  Eigen::MatrixXd K = dense_ar1_precision(T, 0.8, 0.15);
  Eigen::VectorXd rhs(T);
  for (int t = 0; t < T; ++t) {
    const double v = KscMixture::var[static_cast<std::size_t>(s[t])];
    K(t, t) += 1.0 / v;
    rhs[t] = (ystar[t] - KscMixture::mean[static_cast<std::size_t>(s[t])]) / v;
  }
  CHECK((dense(cond.precision) - K).norm() < 1e-12);
  CHECK((cond.mean() - K.ldlt().solve(rhs)).norm() < 1e-10);
}

TEST_CASE("log-squared transform") {
  const Eigen::VectorXd e = Eigen::Vector3d(0.0, 1.0, -2.0);
  const Eigen::VectorXd y = log_squared(e, 1e-4);
  CHECK(y[0] == doctest::Approx(std::log(1e-4)));
  CHECK(y[2] == doctest::Approx(std::log(4.0 + 1e-4)));
}

TEST_CASE("prior sampler reproduces the stationary variance") {
  Rng rng(12);
  const int reps = 40000;
  double s0 = 0.0, sT = 0.0;
  for (int r = 0; r < reps; ++r) {
    const Eigen::VectorXd h = sample_log_vol_prior(5, 0.9, 0.1, rng);
    s0 += h[0] * h[0];
    sT += h[4] * h[4];
  }
  const double v = 0.1 / (1 - 0.81);
  CHECK(std::abs(s0 / reps - v) < 0.03 * v);
  CHECK(std::abs(sT / reps - v) < 0.03 * v);
}

namespace {

// Exact density of y* = log(e^2 + c) with e ~ N(0, exp(h)), and the mixture
// density of y* - h, both evaluated directly.
double exact_ystar_logpdf(double ystar, double h, double c) {
  const double u = std::exp(ystar) - c;
  const double x = std::log(u) - h;
  return -0.5 * std::log(2.0 * std::numbers::pi) + 0.5 * x - 0.5 * std::exp(x) + std::log((u + c) / u);
}

double mixture_logpdf(double d) {
  double s = 0.0;
  for (int j = 0; j < KscMixture::kComponents; ++j) {
    s += KscMixture::prob[j] * std::exp(-0.5 * std::pow(d - KscMixture::mean[j], 2) / KscMixture::var[j]) /
         std::sqrt(2.0 * std::numbers::pi * KscMixture::var[j]);
  }
  return std::log(s);
}

// Marginal CDF of h_1 given e_1, e_2 under the AR(1) prior, integrating h_2 on a grid.
oracle::GridCdf h1_posterior(const Eigen::Vector2d& e, double phi, double w) {
  const double v1 = w / (1.0 - phi * phi);
  return oracle::GridCdf(
      [=](double h1) {
        const int m = 3001;
        const double lo = -25.0, hi = 15.0, dh = (hi - lo) / (m - 1);
        double acc = 0.0;
        for (int k = 0; k < m; ++k) {
          const double h2 = lo + k * dh;
          const double lk = -0.5 * std::pow(h2 - phi * h1, 2) / w - 0.5 * h2 - 0.5 * e[1] * e[1] * std::exp(-h2);
          acc += std::exp(lk);
        }
        return -0.5 * h1 * h1 / v1 - 0.5 * h1 - 0.5 * e[0] * e[0] * std::exp(-h1) + std::log(acc);
      },
      -25.0, 15.0, 4001);
}

std::vector<double> h1_chain(const Eigen::Vector2d& e, double phi, double w, bool correct, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(2);
  std::vector<double> out;
  long accepted = 0;
  const int iters = 300000;
  for (int it = 0; it < iters; ++it) {
    LogVolDraw d = sample_log_vol(e, h, phi, w, 1e-4, correct, rng);
    accepted += d.accepted;
    h = d.h;
    if (it % 3 == 2) out.push_back(h[0]);
  }
  if (correct) CHECK(static_cast<double>(accepted) / iters > 0.5);
  return out;
}

}  // namespace

TEST_CASE("mixture weight is the exact over mixture log-likelihood ratio") {
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::VectorXd e = rng.normal_vector(6) * 0.5;
    e[0] = 2e-3;  // below the offset scale
    const Eigen::VectorXd ystar = log_squared(e, 1e-4);
    const Eigen::VectorXd ha = rng.normal_vector(6), hb = rng.normal_vector(6) * 2.0;
    double direct = 0.0;
    for (int t = 0; t < 6; ++t) {
      direct += exact_ystar_logpdf(ystar[t], ha[t], 1e-4) - mixture_logpdf(ystar[t] - ha[t]);
      direct -= exact_ystar_logpdf(ystar[t], hb[t], 1e-4) - mixture_logpdf(ystar[t] - hb[t]);
    }
    const double ours = mixture_log_weight(e, ystar, ha) - mixture_log_weight(e, ystar, hb);
    CHECK(ours == doctest::Approx(direct).epsilon(1e-7));
  }
}

TEST_CASE("corrected volatility update targets the exact posterior of h") {
  const double phi = 0.9, w = 0.3;
  for (const Eigen::Vector2d& e : {Eigen::Vector2d(0.3, 1.7), Eigen::Vector2d(0.003, 0.8)}) {
    const oracle::GridCdf F = h1_posterior(e, phi, w);
    const std::vector<double> x = h1_chain(e, phi, w, true, 18);
    const double D = oracle::ks_distance(x, [&](double v) { return F(v); });
    CHECK(D < 0.01);
    CHECK(oracle::ks_pvalue(D, x.size()) > 1e-4);
  }
  // the plain mixture draw is visibly off when e^2 is below the offset
  const Eigen::Vector2d e(0.003, 0.8);
  const oracle::GridCdf F = h1_posterior(e, phi, w);
  const std::vector<double> x = h1_chain(e, phi, w, false, 19);
  CHECK(oracle::ks_distance(x, [&](double v) { return F(v); }) > 0.02);
}
