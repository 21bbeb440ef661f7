#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oivar/dataset.hpp"
#include "oivar/model_core.hpp"
#include "oivar/posterior.hpp"
#include "oivar/random.hpp"
#include "oivar/sampler.hpp"

namespace oivar {

struct PredictivePath {
  Eigen::MatrixXd y;                  // horizon x n simulated values
  Eigen::MatrixXd h;                  // horizon x n simulated log-volatilities
  std::vector<Eigen::VectorXd> mean;  // conditional mean of step s given the path to s-1
  std::vector<Eigen::MatrixXd> cov;   // B0^{-1} D_{T+s} B0^{-T}
};

// Iterates the VAR forward from the last p rows of `history`. With
// shocks = false the structural shocks are set to zero (the volatility state
// still evolves with its own innovations unless omega2 is zero).
PredictivePath predictive_path(const VarSvParams& params, const Eigen::RowVectorXd& h_last,
                               const Eigen::MatrixXd& history, int horizon, Rng& rng, bool shocks = true);

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool defined = true;  // false when the loss differential has zero variance and nonzero mean
  double mean_diff = 0.0;
  double long_run_variance = 0.0;
};

// Diebold-Mariano test with d = loss_benchmark - loss_alt and a Bartlett
// long-run variance with h - 1 lags.
DmResult dm_test(std::span<const double> loss_benchmark, std::span<const double> loss_alt, int horizon);

double rmsfe(std::span<const double> errors);

// Forecasts for all variables and the requested horizons from a posterior
// sample. `history` is the estimation sample in the model's ordering;
// `future` holds the realized values for rows history.rows() .. (may be
// shorter than the largest horizon; missing horizons are NaN filled).
struct OriginForecast {
  std::vector<int> horizons;
  Eigen::MatrixXd point;        // horizons x n
  Eigen::MatrixXd log_density;  // horizons x n
  Eigen::MatrixXd log_density_se;
  int floored = 0;
};

OriginForecast forecast_origin(const PosteriorSample& post, const Eigen::MatrixXd& history,
                               const Eigen::MatrixXd& future, const std::vector<int>& horizons, int paths_per_draw,
                               Rng& rng);

struct ModelSpec {
  std::string name;
  ImpactStructure structure = ImpactStructure::unrestricted;
  std::vector<int> ordering;  // empty = as given
  int p = 2;
};

struct ForecastConfig {
  std::vector<int> horizons{1, 6, 12};
  int first_origin = 0;  // number of transformed rows used at the first origin
  int last_origin = -1;  // inclusive; -1 = as late as the shortest horizon allows
  int origin_step = 1;
  std::vector<int> targets;  // empty = all variables
  int paths_per_draw = 1;
  int reestimate_every = 1;
  McmcConfig mcmc;
  int threads = 1;
  std::size_t benchmark = 0;  // index into the model list
  PriorOverrides priors;
  SamplerOptions sampler;  // structure is taken from each model
};

struct ForecastRecord {
  std::string model;
  int origin = 0;
  int variable = 0;
  int horizon = 0;
  double point = 0.0;
  double actual = 0.0;
  double log_density = 0.0;
  double log_density_se = 0.0;
};

struct ForecastRow {
  std::string model;
  std::string variable;
  int horizon = 0;
  int origins = 0;
  double rmsfe = 0.0;
  double alpl = 0.0;
  double alpl_se = 0.0;
  DmResult dm_rmsfe;
  DmResult dm_alpl;
};

struct ForecastTable {
  std::vector<ForecastRow> rows;
  std::vector<ForecastRecord> records;
  std::vector<std::string> log;  // skipped origins and floored densities
  std::string benchmark;

  const ForecastRow& row(const std::string& model, const std::string& variable, int horizon) const;
  void write_csv(const std::string& path) const;
  void write_records_csv(const std::string& path) const;
  void write_json(const std::string& path) const;
};

// Posterior for one model fitted to the first `rows` transformed observations.
// The structure in `sampler` is replaced by the model's.
PosteriorSample estimate_model(const Dataset& data, int rows, const ModelSpec& model, const McmcConfig& mcmc,
                               const PriorOverrides& overrides = {}, const SamplerOptions& sampler = {});

ForecastTable recursive_eval(const Dataset& data, const std::vector<ModelSpec>& models, const ForecastConfig& cfg);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

}  // namespace oivar
