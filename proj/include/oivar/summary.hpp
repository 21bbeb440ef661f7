#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oivar/posterior.hpp"

namespace oivar {

// Posterior summaries in the original variable labels (draws estimated under
// a permuted ordering are mapped back through meta.ordering).
struct PosteriorSummary {
  std::vector<std::string> names;
  ModelDims dims;
  std::size_t draws = 0;
  ImpactStructure structure = ImpactStructure::unrestricted;
  Eigen::MatrixXd A_mean;
  Eigen::MatrixXd B0_mean;
  Eigen::MatrixXd B0_se;
  Eigen::MatrixXd B0_q05;
  Eigen::MatrixXd B0_q95;
  Eigen::VectorXd phi_mean;
  Eigen::VectorXd omega2_mean;
  double kappa1_mean = 0.0;
  double kappa1_se = 0.0;
  double kappa2_mean = 0.0;
  double kappa2_se = 0.0;
  Eigen::MatrixXd sigma_uncond_mean;
  // T x n(n+1)/2 columns (i <= j, row-major over the upper triangle);
  // empty when the sample carries no log-volatility paths.
  Eigen::MatrixXd sigma_mean;
  Eigen::MatrixXd sigma_se;
  double mean_sweep_seconds = 0.0;
};

PosteriorSummary summarize(const PosteriorSample& sample, const std::vector<std::string>& names);

// Column labels "s_<name_i>_<name_j>" matching sigma_mean.
std::vector<std::string> sigma_columns(const std::vector<std::string>& names);
int sigma_column(int i, int j, int n);

void write_summary_json(const std::string& path, const PosteriorSummary& s);
void write_b0_csv(const std::string& path, const PosteriorSummary& s);
void write_sigma_csv(const std::string& path, const PosteriorSummary& s, const std::vector<std::string>& dates);
std::string describe(const PosteriorSummary& s);

}  // namespace oivar
