#include <cmath>

#include "doctest.h"
#include "oivar/errors.hpp"
#include "oivar/priors.hpp"
#include "oivar/random.hpp"
#include "support/oracles.hpp"

using namespace oivar;

namespace {

Eigen::MatrixXd ar_series(int T, int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd s(T, n);
  for (int j = 0; j < n; ++j) {
    double x = 0.0;
    for (int t = 0; t < T; ++t) {
      x = 0.6 * x + (1.0 + j) * rng.normal();
      s(t, j) = x;
    }
  }
  return s;
}

// AR(4) with intercept via the normal equations, residual variance over N - 1.
double ols_ar4_variance(const Eigen::VectorXd& y) {
  const int q = 4;
  const Eigen::Index N = y.size() - q;
  Eigen::MatrixXd Z(N, q + 1);
  Eigen::VectorXd r(N);
  for (Eigen::Index t = 0; t < N; ++t) {
    Z(t, 0) = 1.0;
    for (int l = 1; l <= q; ++l) Z(t, l) = y[t + q - l];
    r[t] = y[t + q];
  }
  const Eigen::VectorXd b = (Z.transpose() * Z).ldlt().solve(Z.transpose() * r);
  const Eigen::VectorXd e = r - Z * b;
  return (e.array() - e.mean()).square().sum() / static_cast<double>(N - 1);
}

}  // namespace

TEST_CASE("Minnesota constants") {
  const Eigen::MatrixXd s = ar_series(200, 3, 4);
  const auto mc = compute_c_constants(s, 2);
  for (int j = 0; j < 3; ++j) CHECK(mc.s2[j] == doctest::Approx(ols_ar4_variance(s.col(j))).epsilon(1e-10));
  // equation i, lag l, variable j at row 1 + (l-1) n + j
  CHECK(mc.C(1 + 0, 0) == doctest::Approx(1.0));
  CHECK(mc.C(1 + 3 + 1, 1) == doctest::Approx(0.25));
  CHECK(mc.C(1 + 3 + 2, 0) == doctest::Approx(mc.s2[0] / (4.0 * mc.s2[2])));
  CHECK(mc.C(1 + 1, 2) == doctest::Approx(mc.s2[2] / mc.s2[1]));
}

TEST_CASE("short or degenerate series are rejected") {
  CHECK_THROWS_AS(ar_residual_variance(Eigen::VectorXd::LinSpaced(11, 0.0, 1.0), 4), InputError);
  CHECK_THROWS_AS(ar_residual_variance(Eigen::VectorXd::Constant(40, 3.0), 4), InputError);
}

TEST_CASE("prior means put a unit root on level variables only") {
  const Eigen::MatrixXd m = prior_mean_m({true, false, true}, 2);
  CHECK(m.rows() == 7);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(2, 1) == 0.0);
  CHECK(m(3, 2) == 1.0);
  CHECK(m.sum() == 2.0);
  const BoolMatrix mask = own_lag_mask(3, 2);
  CHECK(mask.count() == 6);
  CHECK(mask(1 + 3 + 1, 1));
  CHECK_FALSE(mask(0, 0));
}

TEST_CASE("conditional coefficient variance") {
  const Eigen::MatrixXd s = ar_series(100, 2, 6);
  const auto cfg = make_minnesota_config(s, 2, {false, false});
  Rng rng(1);
  HorseshoeState hs = init_horseshoe(2, 2, rng);
  hs.kappa1 = 0.3;
  hs.kappa2 = 0.02;
  hs.psi(2, 0) = 5.0;
  const Eigen::VectorXd v = conditional_coef_variance(cfg, hs, 0);
  CHECK(v[0] == 100.0);
  CHECK(v[1] == doctest::Approx(0.3 * cfg.C(1, 0)));
  CHECK(v[2] == doctest::Approx(0.02 * 5.0 * cfg.C(2, 0)));
  CHECK(v[3] == doctest::Approx(0.3 * 0.25));
}

TEST_CASE("horseshoe initialization") {
  Rng rng(3);
  const auto det = init_horseshoe(3, 2, rng);
  CHECK(det.psi.isOnes());
  CHECK(det.kappa1 == 1.0);
  CHECK(det.z_k2 == 1.0);
  // the latent representation gives sqrt(psi) ~ half-Cauchy: P(sqrt(psi) <= 1) = 1/2
  std::vector<double> root;
  for (int r = 0; r < 4000; ++r) {
    const auto hs = init_horseshoe(1, 1, rng, HorseshoeInit::prior);
    root.push_back(std::sqrt(hs.psi(1, 0)));
  }
  const double D = oracle::ks_distance(root, [](double x) { return x <= 0 ? 0.0 : 2.0 / M_PI * std::atan(x); });
  CHECK(oracle::ks_pvalue(D, root.size()) > 0.001);
}

TEST_CASE("default B0 and SV priors") {
  const auto oi = B0Prior::unrestricted(3);
  CHECK(oi.mean.isIdentity());
  CHECK(oi.var.isOnes());
  const auto cs = B0Prior::lower_triangular(3);
  CHECK(cs.mean.isZero());
  const auto sv = SvPrior::defaults(2);
  CHECK(sv.phi0[0] == 0.95);
  CHECK(sv.nu[1] == 3.0);
  CHECK(sv.S[0] / (sv.nu[0] - 1.0) == doctest::Approx(0.1));
}

TEST_CASE("prior overrides") {
  const Eigen::MatrixXd s = ar_series(60, 2, 2);
  PriorSet p{make_minnesota_config(s, 1, {false, false}), B0Prior::unrestricted(2), SvPrior::defaults(2)};
  PriorOverrides o;
  o.intercept_var = 10.0;
  o.nu = 5.0;
  o.omega2_mean = 0.2;
  apply_overrides(p, o);
  CHECK(p.coef.intercept_var == 10.0);
  CHECK(p.sv.S[1] == doctest::Approx(0.8));
  o.vphi = -1.0;
  CHECK_THROWS_AS(apply_overrides(p, o), InputError);
}
