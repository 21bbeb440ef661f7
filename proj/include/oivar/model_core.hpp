#pragma once

#include <vector>

#include <Eigen/Dense>

namespace oivar {

struct ModelDims {
  int n = 1;  // variables
  int p = 1;  // lags
  int T = 0;  // estimation rows after lag trimming

  int k() const { return n * p + 1; }
};

// One parameter point of the VAR with multivariate stochastic volatility:
//   y_t = A' x_t + B0^{-1} eps_t,   eps_t ~ N(0, diag(exp(h_t))),
//   h_{i,t} = phi_i h_{i,t-1} + N(0, omega2_i).
// A is k x n with the intercepts in row 0 followed by the p lag blocks;
// rows 1 + (l-1) n + j hold the coefficients on lag l of variable j.
struct VarSvParams {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B0;
  Eigen::VectorXd phi;
  Eigen::VectorXd omega2;

  int n() const { return static_cast<int>(B0.rows()); }
  int k() const { return static_cast<int>(A.rows()); }
  int p() const { return n() > 0 ? (k() - 1) / n() : 0; }
  Eigen::VectorXd intercepts() const { return A.row(0).transpose(); }
  // n x n matrix A_l with y_t = ... + A_l y_{t-l} + ...
  Eigen::MatrixXd lag_matrix(int lag) const;

  static VarSvParams zeros(int n, int p);
};

// T x n log-volatilities of the structural shocks.
struct LogVolPath {
  Eigen::MatrixXd h;

  Eigen::Index T() const { return h.rows(); }
  Eigen::Index n() const { return h.cols(); }
};

// Relabeling of the variables: permuted variable i is original variable
// perm[i], i.e. y~_t = P y_t with P(i, perm[i]) = 1.
class PermutationMap {
 public:
  explicit PermutationMap(std::vector<int> perm);

  static PermutationMap identity(int n);
  static PermutationMap reversed(int n);

  int size() const { return static_cast<int>(perm_.size()); }
  int operator[](int i) const { return perm_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& indices() const { return perm_; }
  PermutationMap inverse() const;
  PermutationMap then(const PermutationMap& next) const;
  Eigen::MatrixXd matrix() const;
  bool is_identity() const;

  // Columns of a T x n data matrix (or any matrix whose columns are variables).
  Eigen::MatrixXd permute_columns(const Eigen::MatrixXd& m) const;
  Eigen::VectorXd permute_vector(const Eigen::VectorXd& v) const;
  // P M P'.
  Eigen::MatrixXd conjugate(const Eigen::MatrixXd& m) const;
  // k x n matrices laid out like A: intercept row, then lag blocks.
  Eigen::MatrixXd permute_coefficients(const Eigen::MatrixXd& coef) const;
  // T x k regressor matrices laid out like X.
  Eigen::MatrixXd permute_regressors(const Eigen::MatrixXd& X) const;

  friend bool operator==(const PermutationMap&, const PermutationMap&) = default;

 private:
  std::vector<int> perm_;
};

// Y (T x n) and X (T x k), X_t = (1, y_{t-1}', ..., y_{t-p}').
struct EstimationData {
  Eigen::MatrixXd Y;
  Eigen::MatrixXd X;
  int p = 1;

  ModelDims dims() const {
    return {static_cast<int>(Y.cols()), p, static_cast<int>(Y.rows())};
  }
};

// Builds the stacked regression from a series matrix whose first p rows are
// the presample.
EstimationData make_estimation_data(const Eigen::MatrixXd& series, int p);
Eigen::RowVectorXd regressor_row(const Eigen::MatrixXd& history, int p);

double log_abs_det(const Eigen::MatrixXd& B0);

// Exact Gaussian log likelihood of Y given X, A, B0 and the log-volatility path.
double log_likelihood(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& A,
                      const Eigen::MatrixXd& B0, const LogVolPath& h);

struct PermutedModel {
  VarSvParams params;
  LogVolPath h;
};

PermutedModel permute_model(const VarSvParams& params, const LogVolPath& h, const PermutationMap& P);

// Sigma = (B0' V_D^{-1} B0)^{-1} where V_D is the stationary mean of D_t.
Eigen::MatrixXd unconditional_covariance(const Eigen::MatrixXd& B0, const Eigen::VectorXd& phi,
                                         const Eigen::VectorXd& omega2);

// Sigma_t = B0^{-1} D_t B0^{-T} for every row of h.
std::vector<Eigen::MatrixXd> reduced_form_cov_path(const Eigen::MatrixXd& B0, const LogVolPath& h);

// Flips rows so the diagonal of B0 is positive.
Eigen::MatrixXd normalize_sign(const Eigen::MatrixXd& B0);

// Largest modulus among the eigenvalues of the VAR companion matrix.
double companion_spectral_radius(const Eigen::MatrixXd& A, int n, int p);

void validate_params(const VarSvParams& params);

}  // namespace oivar
