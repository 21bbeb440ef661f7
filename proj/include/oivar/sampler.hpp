#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "oivar/absolute_normal.hpp"
#include "oivar/model_core.hpp"
#include "oivar/posterior.hpp"
#include "oivar/priors.hpp"
#include "oivar/random.hpp"

namespace oivar {

struct SamplerOptions {
  ImpactStructure structure = ImpactStructure::unrestricted;
  AnBackend an_backend = AnBackend::metropolis;
  double log_offset = 1e-4;  // y* = log(e^2 + offset)
  bool sv_correction = true;  // MH correction of the mixture-based h draw
};

struct ChainState {
  VarSvParams params;
  LogVolPath h;
  HorseshoeState hs;
  Eigen::MatrixXi mix_indicators;  // T x n, entries in 0..6
  Rng rng;
};

// A = prior mean, B0 = I, h = 0, phi = phi0, omega2 = prior mean, deterministic horseshoe.
ChainState initial_state(const EstimationData& data, const PriorSet& priors, std::uint64_t seed,
                         std::uint64_t chain_id = 0);

// Orthonormal basis used to draw one row of B0. v.col(0) spans the direction
// that moves |det B0|; the remaining columns span the other rows of B0.
struct B0RowBasis {
  Eigen::MatrixXd K;     // V^{-1} + U' Omega^{-1} U
  Eigen::MatrixXd C;     // K = T C C'
  Eigen::VectorXd bhat;  // K^{-1} V^{-1} b0
  Eigen::MatrixXd v;     // n x n orthonormal basis
  Eigen::VectorXd xi_hat;
};

B0RowBasis b0_row_basis(const Eigen::MatrixXd& U, const Eigen::VectorXd& h_i, const Eigen::MatrixXd& B0, int row,
                        const Eigen::VectorXd& prior_mean, const Eigen::VectorXd& prior_var);

// Draw of row `row` of B0 from its full conditional given the residuals
// U = Y - XA and the log-volatilities of that structural shock, followed by
// the sign normalization of its diagonal element.
Eigen::VectorXd sample_b0_row(const Eigen::MatrixXd& U, const Eigen::VectorXd& h_i, const Eigen::MatrixXd& B0, int row,
                              const Eigen::VectorXd& prior_mean, const Eigen::VectorXd& prior_var, Rng& rng,
                              AnBackend backend = AnBackend::metropolis);

// Free strict-lower-triangle elements of row `row` of a unit lower triangular B0.
Eigen::VectorXd sample_b0_lower_row(const Eigen::MatrixXd& U, const Eigen::VectorXd& h_i, int row,
                                    const Eigen::VectorXd& prior_mean, const Eigen::VectorXd& prior_var, Rng& rng);

// Gaussian conditional of the coefficients of one equation.
struct CoefConditional {
  Eigen::MatrixXd precision;
  Eigen::VectorXd rhs;
  Eigen::VectorXd mean() const;
};

CoefConditional var_coef_conditional(const EstimationData& data, const PriorSet& priors, const ChainState& state,
                                     int equation);

// Steps 1 to 9 of the sweep.
void sample_b0(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts, ChainState& state);
void sample_b0_lower(const EstimationData& data, const PriorSet& priors, ChainState& state);
void sample_var_coeffs(const EstimationData& data, const PriorSet& priors, ChainState& state);
void sample_psi(const PriorSet& priors, ChainState& state);
void sample_kappa(const PriorSet& priors, ChainState& state);
void sample_latent_z(ChainState& state);
void sample_h(const EstimationData& data, const SamplerOptions& opts, ChainState& state);
void sample_omega2(const PriorSet& priors, ChainState& state);
void sample_phi(const PriorSet& priors, ChainState& state);

void gibbs_sweep(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts, ChainState& state);

struct McmcConfig {
  int burn = 1000;
  int draws = 1000;
  int thin = 1;
  std::uint64_t seed = 1;
  int chains = 1;
  bool keep_paths = true;
};

PosteriorSample run_mcmc(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts,
                         const McmcConfig& cfg);

// CS baseline: same sweep with a unit lower triangular B0 and its prior.
PosteriorSample run_mcmc_cs(const EstimationData& data, const PriorSet& priors, const McmcConfig& cfg);

// Default priors for the given structure built from the series the VAR uses
// (first p rows presample).
PriorSet default_priors(const Eigen::MatrixXd& series, int p, const std::vector<bool>& level_flags,
                        ImpactStructure structure);

}  // namespace oivar
