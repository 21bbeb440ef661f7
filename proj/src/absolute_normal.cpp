#include "oivar/absolute_normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double normal_log_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

void check(const AbsNormalParams& p) {
  if (!(p.rho > 0.0) || !std::isfinite(p.rho) || !std::isfinite(p.mu)) {
    throw InputError("absolute normal requires rho > 0 and finite mu");
  }
}

}  // namespace

double an_log_kernel(double z, const AbsNormalParams& p) {
  if (z == 0.0) return -std::numeric_limits<double>::infinity();
  const double d = z - p.mu;
  return (std::log(std::abs(z)) - 0.5 * d * d) / p.rho;
}

AnProposal an_proposal(const AbsNormalParams& p) {
  check(p);
  AnProposal q{};
  const double root = std::sqrt(p.mu * p.mu + 4.0);
  // Stationary points of log|z| - (z - mu)^2 / 2; the product of the roots is -1.
  q.mode[0] = p.mu >= 0.0 ? 0.5 * (p.mu + root) : -2.0 / (p.mu - root);
  q.mode[1] = p.mu >= 0.0 ? -2.0 / (p.mu + root) : 0.5 * (p.mu - root);
  double log_mass[2];
  for (int c = 0; c < 2; ++c) {
    const double z = q.mode[c];
    q.var[c] = p.rho / (1.0 + 1.0 / (z * z));
    log_mass[c] = an_log_kernel(z, p) + 0.5 * std::log(2.0 * std::numbers::pi * q.var[c]);
  }
  const double total = log_sum_exp(log_mass[0], log_mass[1]);
  q.weight[0] = std::exp(log_mass[0] - total);
  q.weight[1] = std::exp(log_mass[1] - total);
  return q;
}

double AnProposal::log_density(double z) const {
  double out = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < 2; ++c) {
    if (weight[c] > 0.0) out = log_sum_exp(out, std::log(weight[c]) + normal_log_pdf(z, mode[c], var[c]));
  }
  return out;
}

double draw_an_proposal(Rng& rng, const AnProposal& q) {
  const int c = rng.uniform() < q.weight[0] ? 0 : 1;
  return q.mode[c] + std::sqrt(q.var[c]) * rng.normal();
}

double sample_absolute_normal(Rng& rng, const AbsNormalParams& p, double current, AnBackend backend) {
  const AnProposal q = an_proposal(p);
  const double proposal = draw_an_proposal(rng, q);
  if (backend == AnBackend::approximate) return proposal;
  const double log_w_new = an_log_kernel(proposal, p) - q.log_density(proposal);
  const double log_w_cur = an_log_kernel(current, p) - q.log_density(current);
  if (!std::isfinite(log_w_cur)) return proposal;  // current has zero target mass
  if (std::log(rng.uniform()) < log_w_new - log_w_cur) return proposal;
  return current;
}

}  // namespace oivar
