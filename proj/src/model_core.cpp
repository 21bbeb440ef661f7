#include "oivar/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

constexpr double kSingularPivot = 1e-12;

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) {
    throw InputError(std::string(what) + " contains non-finite entries");
  }
}

Eigen::PartialPivLU<Eigen::MatrixXd> checked_lu(const Eigen::MatrixXd& B0) {
  if (B0.rows() != B0.cols() || B0.rows() == 0) {
    throw InputError("B0 must be a non-empty square matrix");
  }
  require_finite(B0, "B0");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B0);
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot >= kSingularPivot)) {
    throw SingularMatrixError("B0 is singular (smallest pivot " + std::to_string(min_pivot) + ")");
  }
  return lu;
}

}  // namespace

Eigen::MatrixXd VarSvParams::lag_matrix(int lag) const {
  const int nv = n();
  Eigen::MatrixXd out(nv, nv);
  // A(1 + (l-1) n + j, i) = (A_l)(i, j)
  out = A.block(1 + (lag - 1) * nv, 0, nv, nv).transpose();
  return out;
}

VarSvParams VarSvParams::zeros(int n, int p) {
  VarSvParams out;
  out.A = Eigen::MatrixXd::Zero(n * p + 1, n);
  out.B0 = Eigen::MatrixXd::Identity(n, n);
  out.phi = Eigen::VectorXd::Zero(n);
  out.omega2 = Eigen::VectorXd::Constant(n, 0.1);
  return out;
}

PermutationMap::PermutationMap(std::vector<int> perm) : perm_(std::move(perm)) {
  std::vector<char> seen(perm_.size(), 0);
  for (int v : perm_) {
    if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)]) {
      throw InputError("permutation is not a bijection on 0..n-1");
    }
    seen[static_cast<std::size_t>(v)] = 1;
  }
}

PermutationMap PermutationMap::identity(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return PermutationMap(std::move(p));
}

PermutationMap PermutationMap::reversed(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = n - 1 - i;
  return PermutationMap(std::move(p));
}

PermutationMap PermutationMap::inverse() const {
  std::vector<int> inv(perm_.size());
  for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])] = i;
  return PermutationMap(std::move(inv));
}

PermutationMap PermutationMap::then(const PermutationMap& next) const {
  if (next.size() != size()) throw InputError("permutation sizes differ");
  std::vector<int> out(perm_.size());
  for (int i = 0; i < size(); ++i) out[static_cast<std::size_t>(i)] = (*this)[next[i]];
  return PermutationMap(std::move(out));
}

Eigen::MatrixXd PermutationMap::matrix() const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(size(), size());
  for (int i = 0; i < size(); ++i) P(i, (*this)[i]) = 1.0;
  return P;
}

bool PermutationMap::is_identity() const {
  for (int i = 0; i < size(); ++i)
    if ((*this)[i] != i) return false;
  return true;
}

Eigen::MatrixXd PermutationMap::permute_columns(const Eigen::MatrixXd& m) const {
  if (m.cols() != size()) throw InputError("permute_columns: column count mismatch");
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < size(); ++i) out.col(i) = m.col((*this)[i]);
  return out;
}

Eigen::VectorXd PermutationMap::permute_vector(const Eigen::VectorXd& v) const {
  if (v.size() != size()) throw InputError("permute_vector: size mismatch");
  Eigen::VectorXd out(v.size());
  for (int i = 0; i < size(); ++i) out[i] = v[(*this)[i]];
  return out;
}

Eigen::MatrixXd PermutationMap::conjugate(const Eigen::MatrixXd& m) const {
  if (m.rows() != size() || m.cols() != size()) throw InputError("conjugate: size mismatch");
  Eigen::MatrixXd out(size(), size());
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) out(i, j) = m((*this)[i], (*this)[j]);
  return out;
}

Eigen::MatrixXd PermutationMap::permute_coefficients(const Eigen::MatrixXd& coef) const {
  const int n = size();
  if (coef.cols() != n || (coef.rows() - 1) % n != 0) {
    throw InputError("permute_coefficients: expected a (np+1) x n matrix");
  }
  const int p = static_cast<int>((coef.rows() - 1) / n);
  Eigen::MatrixXd out(coef.rows(), n);
  for (int i = 0; i < n; ++i) {
    const int src_eq = (*this)[i];
    out(0, i) = coef(0, src_eq);
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < n; ++j) out(1 + l * n + j, i) = coef(1 + l * n + (*this)[j], src_eq);
  }
  return out;
}

Eigen::MatrixXd PermutationMap::permute_regressors(const Eigen::MatrixXd& X) const {
  const int n = size();
  if ((X.cols() - 1) % n != 0) throw InputError("permute_regressors: expected np+1 columns");
  const int p = static_cast<int>((X.cols() - 1) / n);
  Eigen::MatrixXd out(X.rows(), X.cols());
  out.col(0) = X.col(0);
  for (int l = 0; l < p; ++l)
    for (int j = 0; j < n; ++j) out.col(1 + l * n + j) = X.col(1 + l * n + (*this)[j]);
  return out;
}

EstimationData make_estimation_data(const Eigen::MatrixXd& series, int p) {
  if (p < 1) throw InputError("lag order must be at least 1");
  if (series.rows() <= p) throw InputError("series shorter than the lag order");
  require_finite(series, "series");
  const Eigen::Index n = series.cols();
  const Eigen::Index T = series.rows() - p;
  EstimationData out;
  out.p = p;
  out.Y = series.bottomRows(T);
  out.X.resize(T, n * p + 1);
  out.X.col(0).setOnes();
  for (int l = 1; l <= p; ++l) {
    out.X.block(0, 1 + (l - 1) * n, T, n) = series.block(p - l, 0, T, n);
  }
  return out;
}

Eigen::RowVectorXd regressor_row(const Eigen::MatrixXd& history, int p) {
  const Eigen::Index n = history.cols();
  if (history.rows() < p) throw InputError("history shorter than the lag order");
  Eigen::RowVectorXd x(n * p + 1);
  x[0] = 1.0;
  for (int l = 1; l <= p; ++l) x.segment(1 + (l - 1) * n, n) = history.row(history.rows() - l);
  return x;
}

double log_abs_det(const Eigen::MatrixXd& B0) {
  const auto lu = checked_lu(B0);
  return lu.matrixLU().diagonal().cwiseAbs().array().log().sum();
}

double log_likelihood(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X, const Eigen::MatrixXd& A,
                      const Eigen::MatrixXd& B0, const LogVolPath& h) {
  const Eigen::Index T = Y.rows();
  const Eigen::Index n = Y.cols();
  if (X.rows() != T || A.rows() != X.cols() || A.cols() != n || B0.rows() != n || h.h.rows() != T ||
      h.h.cols() != n) {
    throw InputError("log_likelihood: inconsistent dimensions");
  }
  require_finite(Y, "Y");
  require_finite(X, "X");
  require_finite(A, "A");
  require_finite(h.h, "h");
  const double logdet = log_abs_det(B0);
  const Eigen::MatrixXd E = (Y - X * A) * B0.transpose();
  const double quad = (E.array().square() * (-h.h.array()).exp()).sum();
  return -0.5 * static_cast<double>(n * T) * std::log(2.0 * std::numbers::pi) + static_cast<double>(T) * logdet -
         0.5 * h.h.sum() - 0.5 * quad;
}

PermutedModel permute_model(const VarSvParams& params, const LogVolPath& h, const PermutationMap& P) {
  if (P.size() != params.n() || h.h.cols() != params.n()) {
    throw InputError("permute_model: permutation size does not match the model");
  }
  PermutedModel out;
  out.params.A = P.permute_coefficients(params.A);
  out.params.B0 = P.conjugate(params.B0);
  out.params.phi = P.permute_vector(params.phi);
  out.params.omega2 = P.permute_vector(params.omega2);
  out.h.h = P.permute_columns(h.h);
  return out;
}

Eigen::MatrixXd unconditional_covariance(const Eigen::MatrixXd& B0, const Eigen::VectorXd& phi,
                                         const Eigen::VectorXd& omega2) {
  const Eigen::Index n = B0.rows();
  if (phi.size() != n || omega2.size() != n) throw InputError("unconditional_covariance: size mismatch");
  if ((phi.array().abs() >= 1.0).any()) throw InputError("unconditional_covariance: |phi| must be < 1");
  if ((omega2.array() < 0.0).any()) throw InputError("unconditional_covariance: omega2 must be >= 0");
  // B0^{-1} V_D B0^{-T}; scaling the rows of B0 by V_D^{-1/2} first underflows
  // to a singular matrix when phi is close to 1.
  const Eigen::ArrayXd vd = (omega2.array() / (2.0 * (1.0 - phi.array().square()))).exp();
  const Eigen::MatrixXd Binv = checked_lu(B0).inverse();
  Eigen::MatrixXd sigma = Binv * vd.matrix().asDiagonal() * Binv.transpose();
  return 0.5 * (sigma + sigma.transpose());
}

std::vector<Eigen::MatrixXd> reduced_form_cov_path(const Eigen::MatrixXd& B0, const LogVolPath& h) {
  if (h.h.cols() != B0.rows()) throw InputError("reduced_form_cov_path: size mismatch");
  const Eigen::MatrixXd Binv = checked_lu(B0).inverse();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(h.h.rows()));
  for (Eigen::Index t = 0; t < h.h.rows(); ++t) {
    const Eigen::MatrixXd scaled = Binv * h.h.row(t).array().exp().matrix().asDiagonal();
    Eigen::MatrixXd s = scaled * Binv.transpose();
    out[static_cast<std::size_t>(t)] = 0.5 * (s + s.transpose());
  }
  return out;
}

Eigen::MatrixXd normalize_sign(const Eigen::MatrixXd& B0) {
  Eigen::MatrixXd out = B0;
  for (Eigen::Index i = 0; i < B0.rows(); ++i) {
    if (!(std::abs(B0(i, i)) >= kSingularPivot)) {
      throw DegenerateStateError("normalize_sign: diagonal element " + std::to_string(i) + " is zero");
    }
    if (B0(i, i) < 0.0) out.row(i) *= -1.0;
  }
  return out;
}

double companion_spectral_radius(const Eigen::MatrixXd& A, int n, int p) {
  const int m = n * p;
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(m, m);
  F.topRows(n) = A.block(1, 0, m, n).transpose();
  if (p > 1) F.block(n, 0, m - n, m - n).setIdentity();
  Eigen::EigenSolver<Eigen::MatrixXd> es(F, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void validate_params(const VarSvParams& params) {
  const int n = params.n();
  if (params.B0.cols() != n || params.A.cols() != n || params.phi.size() != n || params.omega2.size() != n ||
      (params.A.rows() - 1) % std::max(n, 1) != 0) {
    throw InputError("VarSvParams: inconsistent dimensions");
  }
  if ((params.phi.array().abs() >= 1.0).any()) throw InputError("VarSvParams: |phi| must be < 1");
  if ((params.omega2.array() <= 0.0).any()) throw InputError("VarSvParams: omega2 must be positive");
  (void)checked_lu(params.B0);
}

}  // namespace oivar
