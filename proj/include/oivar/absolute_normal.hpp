#pragma once

#include "oivar/random.hpp"

namespace oivar {

// AN(mu, rho): density proportional to |z|^{1/rho} exp(-(z - mu)^2 / (2 rho)).
struct AbsNormalParams {
  double mu = 0.0;
  double rho = 1.0;
};

enum class AnBackend {
  metropolis,  // independence MH against the exact density
  approximate  // draw from the two-mode normal mixture, no correction
};

// Two-component normal mixture centred at the density modes
// z+- = (mu +- sqrt(mu^2 + 4)) / 2, variances from the local curvature and
// weights proportional to the Laplace mass at each mode.
struct AnProposal {
  double mode[2];
  double var[2];
  double weight[2];

  double log_density(double z) const;
};

AnProposal an_proposal(const AbsNormalParams& p);
double an_log_kernel(double z, const AbsNormalParams& p);
double draw_an_proposal(Rng& rng, const AnProposal& q);

// One transition of a chain with AN(mu, rho) as invariant distribution
// (metropolis), or one mixture draw (approximate; `current` ignored).
double sample_absolute_normal(Rng& rng, const AbsNormalParams& p, double current,
                              AnBackend backend = AnBackend::metropolis);

}  // namespace oivar
