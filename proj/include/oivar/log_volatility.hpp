#pragma once

#include <array>

#include <Eigen/Dense>

#include "oivar/random.hpp"

namespace oivar {

// Seven-component normal mixture approximation of the log chi-square(1)
// distribution (Kim, Shephard and Chib, 1998). Means include the -1.2704 shift.
struct KscMixture {
  static constexpr int kComponents = 7;
  static constexpr std::array<double, kComponents> prob = {0.00730, 0.10556, 0.00002, 0.04395,
                                                           0.34001, 0.24566, 0.25750};
  static constexpr std::array<double, kComponents> mean = {
      -10.12999 - 1.2704, -3.97281 - 1.2704, -8.56686 - 1.2704, 2.77786 - 1.2704,
      0.61942 - 1.2704,   1.79518 - 1.2704,  -1.08819 - 1.2704};
  static constexpr std::array<double, kComponents> var = {5.79596, 2.61369, 5.17950, 0.16735,
                                                          0.64009, 0.34023, 1.26261};

  static double cdf(double x);
};

// Symmetric tridiagonal matrix: diag (size T) and the first off-diagonal (size T-1).
struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;
};

// Lower bidiagonal Cholesky factor of a tridiagonal SPD matrix.
struct BandedCholesky {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;

  explicit BandedCholesky(const Tridiagonal& K);
  // Solves K x = b.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  // Solves L' x = b.
  Eigen::VectorXd solve_upper(const Eigen::VectorXd& b) const;
};

// Precision of h_{1..T} under h_1 ~ N(0, omega2/(1-phi^2)), h_t | h_{t-1} ~ N(phi h_{t-1}, omega2).
Tridiagonal ar1_prior_precision(Eigen::Index T, double phi, double omega2);

// Gaussian draw with tridiagonal precision K and canonical mean K^{-1} rhs.
Eigen::VectorXd sample_tridiagonal_gaussian(const Tridiagonal& K, const Eigen::VectorXd& rhs, Rng& rng);

// y*_t = log(e_t^2 + offset).
Eigen::VectorXd log_squared(const Eigen::VectorXd& e, double offset);

// Mixture indicators s_t in {0..6} from their discrete conditionals given h.
Eigen::VectorXi sample_mixture_indicators(const Eigen::VectorXd& ystar, const Eigen::VectorXd& h, Rng& rng);

// Conditional posterior of h given y* and indicators: precision and canonical mean.
struct LogVolConditional {
  Tridiagonal precision;
  Eigen::VectorXd rhs;

  Eigen::VectorXd mean() const;
};

LogVolConditional log_vol_conditional(const Eigen::VectorXd& ystar, const Eigen::VectorXi& indicators, double phi,
                                      double omega2);

// Draw from the AR(1) prior of h with the same banded solver (no observations).
Eigen::VectorXd sample_log_vol_prior(Eigen::Index T, double phi, double omega2, Rng& rng);

// sum_t log f(y*_t | h_t) - log f_mix(y*_t | h_t), dropping terms free of h.
// f is the exact density of log(e^2 + offset) with e ~ N(0, exp(h)); the
// offset only enters through a Jacobian that does not depend on h.
double mixture_log_weight(const Eigen::VectorXd& e, const Eigen::VectorXd& ystar, const Eigen::VectorXd& h);

struct LogVolDraw {
  Eigen::VectorXd h;
  Eigen::VectorXi indicators;
  bool accepted = true;
};

// One update of h for a single equation given its orthogonalized errors e.
// Indicators and then h are drawn from the mixture model; with `correct` the
// result is an MH proposal accepted with the ratio of mixture_log_weight, which
// leaves the exact conditional of h invariant.
LogVolDraw sample_log_vol(const Eigen::VectorXd& e, const Eigen::VectorXd& h, double phi, double omega2,
                          double offset, bool correct, Rng& rng);

}  // namespace oivar
