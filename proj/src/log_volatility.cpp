#include "oivar/log_volatility.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "oivar/errors.hpp"

namespace oivar {

double KscMixture::cdf(double x) {
  double out = 0.0;
  for (int j = 0; j < kComponents; ++j) {
    out += prob[j] * 0.5 * std::erfc(-(x - mean[j]) / std::sqrt(2.0 * var[j]));
  }
  return out;
}

BandedCholesky::BandedCholesky(const Tridiagonal& K) {
  const Eigen::Index T = K.diag.size();
  diag.resize(T);
  sub.resize(T > 0 ? T - 1 : 0);
  double prev = 0.0;
  for (Eigen::Index t = 0; t < T; ++t) {
    double d = K.diag[t];
    if (t > 0) {
      sub[t - 1] = K.off[t - 1] / prev;
      d -= sub[t - 1] * sub[t - 1];
    }
    if (!(d > 0.0)) throw NumericalError("tridiagonal precision is not positive definite");
    prev = std::sqrt(d);
    diag[t] = prev;
  }
}

Eigen::VectorXd BandedCholesky::solve(const Eigen::VectorXd& b) const {
  const Eigen::Index T = diag.size();
  Eigen::VectorXd x(T);
  // L y = b
  for (Eigen::Index t = 0; t < T; ++t) {
    double v = b[t];
    if (t > 0) v -= sub[t - 1] * x[t - 1];
    x[t] = v / diag[t];
  }
  return solve_upper(x);
}

Eigen::VectorXd BandedCholesky::solve_upper(const Eigen::VectorXd& b) const {
  const Eigen::Index T = diag.size();
  Eigen::VectorXd x(T);
  for (Eigen::Index t = T - 1; t >= 0; --t) {
    double v = b[t];
    if (t + 1 < T) v -= sub[t] * x[t + 1];
    x[t] = v / diag[t];
  }
  return x;
}

Tridiagonal ar1_prior_precision(Eigen::Index T, double phi, double omega2) {
  if (!(omega2 > 0.0) || !(std::abs(phi) < 1.0)) {
    throw InputError("AR(1) prior requires omega2 > 0 and |phi| < 1");
  }
  Tridiagonal K;
  K.diag = Eigen::VectorXd::Constant(T, (1.0 + phi * phi) / omega2);
  K.off = Eigen::VectorXd::Constant(T > 0 ? T - 1 : 0, -phi / omega2);
  if (T == 1) {
    K.diag[0] = (1.0 - phi * phi) / omega2;
  } else if (T > 1) {
    K.diag[0] = 1.0 / omega2;
    K.diag[T - 1] = 1.0 / omega2;
  }
  return K;
}

Eigen::VectorXd sample_tridiagonal_gaussian(const Tridiagonal& K, const Eigen::VectorXd& rhs, Rng& rng) {
  const BandedCholesky L(K);
  const Eigen::VectorXd mean = L.solve(rhs);
  return mean + L.solve_upper(rng.normal_vector(rhs.size()));
}

Eigen::VectorXd log_squared(const Eigen::VectorXd& e, double offset) {
  Eigen::VectorXd out = (e.array().square() + offset).log().matrix();
  if (!out.allFinite()) throw InputError("log-squared residuals are not finite");
  return out;
}

Eigen::VectorXi sample_mixture_indicators(const Eigen::VectorXd& ystar, const Eigen::VectorXd& h, Rng& rng) {
  constexpr int J = KscMixture::kComponents;
  std::array<double, J> log_norm{};
  for (int j = 0; j < J; ++j) {
    log_norm[j] = std::log(KscMixture::prob[j]) - 0.5 * std::log(KscMixture::var[j]);
  }
  Eigen::VectorXi s(ystar.size());
  std::array<double, J> w{};
  for (Eigen::Index t = 0; t < ystar.size(); ++t) {
    double wmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j) {
      const double d = ystar[t] - h[t] - KscMixture::mean[j];
      w[j] = log_norm[j] - 0.5 * d * d / KscMixture::var[j];
      wmax = std::max(wmax, w[j]);
    }
    double total = 0.0;
    for (int j = 0; j < J; ++j) {
      w[j] = std::exp(w[j] - wmax);
      total += w[j];
    }
    double u = rng.uniform() * total;
    int pick = J - 1;
    for (int j = 0; j < J; ++j) {
      u -= w[j];
      if (u <= 0.0) {
        pick = j;
        break;
      }
    }
    s[t] = pick;
  }
  return s;
}

Eigen::VectorXd LogVolConditional::mean() const { return BandedCholesky(precision).solve(rhs); }

LogVolConditional log_vol_conditional(const Eigen::VectorXd& ystar, const Eigen::VectorXi& indicators, double phi,
                                      double omega2) {
  const Eigen::Index T = ystar.size();
  LogVolConditional out;
  out.precision = ar1_prior_precision(T, phi, omega2);
  out.rhs.resize(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    const int j = indicators[t];
    out.precision.diag[t] += 1.0 / KscMixture::var[j];
    out.rhs[t] = (ystar[t] - KscMixture::mean[j]) / KscMixture::var[j];
  }
  return out;
}

Eigen::VectorXd sample_log_vol_prior(Eigen::Index T, double phi, double omega2, Rng& rng) {
  return sample_tridiagonal_gaussian(ar1_prior_precision(T, phi, omega2), Eigen::VectorXd::Zero(T), rng);
}

double mixture_log_weight(const Eigen::VectorXd& e, const Eigen::VectorXd& ystar, const Eigen::VectorXd& h) {
  constexpr int J = KscMixture::kComponents;
  double out = 0.0;
  for (Eigen::Index t = 0; t < e.size(); ++t) {
    if (e[t] == 0.0) continue;
    const double x = std::log(e[t] * e[t]) - h[t];
    double terms[J];
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < J; ++j) {
      const double d = ystar[t] - h[t] - KscMixture::mean[j];
      terms[j] = std::log(KscMixture::prob[j]) - 0.5 * std::log(KscMixture::var[j]) - 0.5 * d * d / KscMixture::var[j];
      m = std::max(m, terms[j]);
    }
    double sum = 0.0;
    for (int j = 0; j < J; ++j) sum += std::exp(terms[j] - m);
    // log chi2(1) density of x up to a constant, minus the mixture density
    out += 0.5 * x - 0.5 * std::exp(x) - (m + std::log(sum));
  }
  return out;
}

LogVolDraw sample_log_vol(const Eigen::VectorXd& e, const Eigen::VectorXd& h, double phi, double omega2,
                          double offset, bool correct, Rng& rng) {
  const Eigen::VectorXd ystar = log_squared(e, offset);
  LogVolDraw out;
  out.indicators = sample_mixture_indicators(ystar, h, rng);
  const LogVolConditional cond = log_vol_conditional(ystar, out.indicators, phi, omega2);
  out.h = sample_tridiagonal_gaussian(cond.precision, cond.rhs, rng);
  if (correct) {
    const double log_ratio = mixture_log_weight(e, ystar, out.h) - mixture_log_weight(e, ystar, h);
    if (!(std::log(rng.uniform()) < log_ratio)) {
      out.h = h;
      out.accepted = false;
    }
  }
  return out;
}

}  // namespace oivar
