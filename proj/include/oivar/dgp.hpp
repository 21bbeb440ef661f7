#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "oivar/dataset.hpp"
#include "oivar/model_core.hpp"
#include "oivar/random.hpp"

namespace oivar {

// Simulated data set: the first p rows of data.transformed are presample,
// and h_truth has one row per estimation observation.
struct SimulatedData {
  Dataset data;
  VarSvParams truth;
  LogVolPath h_truth;
  int p = 4;

  EstimationData estimation_data() const { return make_estimation_data(data.transformed, p); }
};

// Random stationary design with intercepts U(-10, 10), A1 diagonal U(0, 0.5),
// A1 off-diagonal U(-0.2, 0.2), higher lags N(0, 0.01 / l^2), B0 diagonal
// U(0.5, 2), B0 off-diagonal N(0, 1), phi = 0.95 and omega2 = 0.05.
// With sv_on false the log-volatilities are identically zero.
SimulatedData generate_section5(std::uint64_t seed, int n = 3, int T = 500, int p = 4, bool sv_on = true);

// Same design with n = 3, T = 500, p = 4 and a fixed non-triangular B0.
SimulatedData generate_section61(std::uint64_t seed, bool sv_on = true);
Eigen::MatrixXd section61_impact();

// Draws the lag coefficients and intercepts of the random design; redraws
// explosive systems up to max_tries times.
VarSvParams draw_section5_params(Rng& rng, int n, int p, int max_tries = 100);

// Simulates T observations after a 100-period burn-in started at the
// unconditional mean. Returns (p + T) x n series rows and T x n log-vols.
void simulate_var_sv(const VarSvParams& params, int T, bool sv_on, Rng& rng, Eigen::MatrixXd& series,
                     Eigen::MatrixXd& h);

// Monte Carlo E u_i^2 when B0 is unit lower triangular with N(0, 1) free
// elements and the structural shocks are N(0, 1); the exact value is 2^{i-1}.
Eigen::VectorXd ordering_variance_demo(int n, long reps, Rng& rng);

}  // namespace oivar
