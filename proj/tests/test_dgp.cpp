#include <cmath>

#include "doctest.h"
#include "oivar/dgp.hpp"
#include "oivar/errors.hpp"

using namespace oivar;

namespace {

// Structural shocks implied by the simulated data and the true parameters.
Eigen::MatrixXd structural_shocks(const SimulatedData& sim) {
  const EstimationData ed = sim.estimation_data();
  return (ed.Y - ed.X * sim.truth.A) * sim.truth.B0.transpose();
}

}  // namespace

TEST_CASE("random design draws stay inside their ranges") {
  Rng rng(1);
  for (int rep = 0; rep < 200; ++rep) {
    const VarSvParams par = draw_section5_params(rng, 3, 4);
    CHECK(companion_spectral_radius(par.A, 3, 4) < 1.0);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(par.A(0, i)) <= 10.0);
      for (int j = 0; j < 3; ++j) {
        const double a1 = par.lag_matrix(1)(i, j);
        if (i == j) {
          CHECK(a1 >= 0.0);
          CHECK(a1 <= 0.5);
          CHECK(par.B0(i, j) >= 0.5);
          CHECK(par.B0(i, j) <= 2.0);
        } else {
          CHECK(std::abs(a1) <= 0.2);
        }
      }
    }
    CHECK((par.phi.array() == 0.95).all());
    CHECK((par.omega2.array() == 0.05).all());
  }
}

TEST_CASE("higher lag coefficients shrink with the lag") {
  Rng rng(2);
  double ss[5] = {0, 0, 0, 0, 0};
  int count = 0;
  for (int rep = 0; rep < 400; ++rep) {
    const VarSvParams par = draw_section5_params(rng, 3, 4);
    for (int l = 2; l <= 4; ++l) ss[l] += par.lag_matrix(l).squaredNorm();
    ++count;
  }
  for (int l = 2; l <= 4; ++l) {
    const double sd = std::sqrt(ss[l] / (9.0 * count));
    CHECK(sd == doctest::Approx(0.1 / l).epsilon(0.1));
  }
}

TEST_CASE("simulation layout and reproducibility") {
  const SimulatedData a = generate_section5(7, 3, 120, 2, true);
  const SimulatedData b = generate_section5(7, 3, 120, 2, true);
  const SimulatedData c = generate_section5(8, 3, 120, 2, true);
  CHECK(a.data.transformed.rows() == 122);
  CHECK(a.data.n() == 3);
  CHECK(a.data.names[0] == "y1");
  CHECK(a.h_truth.h.rows() == 120);
  CHECK(a.estimation_data().Y.rows() == 120);
  CHECK(a.data.transformed == b.data.transformed);
  CHECK(a.h_truth.h == b.h_truth.h);
  CHECK(a.data.transformed != c.data.transformed);
  CHECK(a.data.transformed.allFinite());
}

TEST_CASE("constant volatility design has unit structural shocks") {
  const SimulatedData sim = generate_section5(3, 3, 4000, 4, false);
  CHECK(sim.h_truth.h.isZero(0.0));
  const Eigen::MatrixXd E = structural_shocks(sim);
  for (int i = 0; i < 3; ++i) {
    CHECK(E.col(i).mean() == doctest::Approx(0.0).epsilon(0.06).scale(1.0));
    CHECK(E.col(i).squaredNorm() / 4000.0 == doctest::Approx(1.0).epsilon(0.08));
  }
  // shocks are mutually uncorrelated
  CHECK(std::abs(E.col(0).dot(E.col(1)) / 4000.0) < 0.06);
}

TEST_CASE("stochastic volatility design follows its AR(1)") {
  const SimulatedData sim = generate_section5(4, 2, 6000, 1, true);
  const Eigen::MatrixXd E = structural_shocks(sim);
  const auto& H = sim.h_truth.h;
  for (int i = 0; i < 2; ++i) {
    // standardized shocks
    const Eigen::ArrayXd z = E.col(i).array() * (-0.5 * H.col(i).array()).exp();
    CHECK(z.square().mean() == doctest::Approx(1.0).epsilon(0.06));
    const Eigen::VectorXd lag = H.col(i).head(5999);
    const Eigen::VectorXd cur = H.col(i).tail(5999);
    const double phi = lag.dot(cur) / lag.squaredNorm();
    CHECK(phi == doctest::Approx(0.95).epsilon(0.02));
    const double w = (cur - phi * lag).squaredNorm() / 5998.0;
    CHECK(w == doctest::Approx(0.05).epsilon(0.08));
  }
}

TEST_CASE("fixed impact design") {
  const Eigen::MatrixXd B0 = section61_impact();
  CHECK(B0.determinant() == doctest::Approx(2.92).epsilon(1e-12));
  const SimulatedData sim = generate_section61(5, true);
  CHECK(sim.truth.B0 == B0);
  CHECK(sim.data.transformed.rows() == 504);
  CHECK(sim.p == 4);
  CHECK(sim.h_truth.h.rows() == 500);
}

TEST_CASE("triangular impact variances double along the ordering") {
  Rng rng(9);
  const Eigen::VectorXd v = ordering_variance_demo(4, 1000000, rng);
  for (int i = 0; i < 4; ++i) CHECK(v[i] == doctest::Approx(std::pow(2.0, i)).epsilon(0.03));
  CHECK_THROWS_AS(ordering_variance_demo(3, 0, rng), InputError);
}

TEST_CASE("design errors") {
  Rng rng(10);
  CHECK_THROWS_AS(draw_section5_params(rng, 0, 1), InputError);
  CHECK_THROWS_AS(draw_section5_params(rng, 2, 1, 0), InputError);
  VarSvParams explosive = VarSvParams::zeros(1, 1);
  explosive.A(1, 0) = 1.2;
  Eigen::MatrixXd s, h;
  CHECK_THROWS_AS(simulate_var_sv(explosive, 10, false, rng, s, h), InputError);
}
