#include "oivar/sampler.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "oivar/errors.hpp"
#include "oivar/log_volatility.hpp"

namespace oivar {

namespace {

Eigen::MatrixXd residuals(const EstimationData& data, const VarSvParams& params) {
  return data.Y - data.X * params.A;
}

// Unit vector orthogonal to every row of B0 except `row`.
Eigen::VectorXd complement_of_other_rows(const Eigen::MatrixXd& B0, int row) {
  const Eigen::Index n = B0.rows();
  if (n == 1) return Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd others(n - 1, n);
  for (Eigen::Index r = 0, o = 0; r < n; ++r) {
    if (r != row) others.row(o++) = B0.row(r);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(others, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv[n - 2] > 1e-12 * std::max(1.0, sv[0]))) {
    throw DegenerateStateError("rows of B0 other than " + std::to_string(row) + " are rank deficient");
  }
  return svd.matrixV().col(n - 1);
}

// Orthonormal basis of R^n whose first column is v1.
Eigen::MatrixXd basis_with_first(const Eigen::VectorXd& v1) {
  const Eigen::Index n = v1.size();
  Eigen::MatrixXd v(n, n);
  v.col(0) = v1;
  if (n > 1) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v1.transpose(), Eigen::ComputeFullV);
    v.rightCols(n - 1) = svd.matrixV().rightCols(n - 1);
  }
  return v;
}

double log_ic_factor(double phi, double h1, double omega2) {
  const double s = 1.0 - phi * phi;
  return 0.5 * std::log(s) - 0.5 * s * h1 * h1 / omega2;
}

std::string dump_state(const ChainState& s) {
  std::ostringstream os;
  os << "\n  B0 =\n" << s.params.B0 << "\n  phi = " << s.params.phi.transpose()
     << "\n  omega2 = " << s.params.omega2.transpose() << "\n  kappa = (" << s.hs.kappa1 << ", " << s.hs.kappa2
     << ")\n  h range = [" << (s.h.h.size() ? s.h.h.minCoeff() : 0.0) << ", "
     << (s.h.h.size() ? s.h.h.maxCoeff() : 0.0) << "]";
  return os.str();
}

}  // namespace

ChainState initial_state(const EstimationData& data, const PriorSet& priors, std::uint64_t seed,
                         std::uint64_t chain_id) {
  const ModelDims d = data.dims();
  ChainState s{VarSvParams::zeros(d.n, d.p), LogVolPath{Eigen::MatrixXd::Zero(d.T, d.n)}, {},
               Eigen::MatrixXi::Zero(d.T, d.n), Rng(seed, chain_id)};
  s.params.A = priors.coef.m;
  s.params.B0.setIdentity();
  s.params.phi = priors.sv.phi0.cwiseMax(-0.99).cwiseMin(0.99);
  s.params.omega2 = (priors.sv.S.array() / (priors.sv.nu.array() - 1.0).max(1.0)).matrix();
  s.hs = init_horseshoe(d.n, d.p, s.rng, HorseshoeInit::deterministic);
  return s;
}

B0RowBasis b0_row_basis(const Eigen::MatrixXd& U, const Eigen::VectorXd& h_i, const Eigen::MatrixXd& B0, int row,
                        const Eigen::VectorXd& prior_mean, const Eigen::VectorXd& prior_var) {
  const Eigen::Index T = U.rows();
  const Eigen::Index n = U.cols();
  if (h_i.size() != T || B0.rows() != n || prior_mean.size() != n || prior_var.size() != n) {
    throw InputError("b0_row_basis: inconsistent dimensions");
  }
  if (!h_i.allFinite()) throw InputError("b0_row_basis: non-finite log-volatility");
  B0RowBasis out;
  const Eigen::VectorXd w = (-h_i.array()).exp().sqrt().matrix();
  const Eigen::MatrixXd Uw = w.asDiagonal() * U;
  out.K = prior_var.cwiseInverse().asDiagonal();
  out.K.selfadjointView<Eigen::Lower>().rankUpdate(Uw.transpose());
  out.K = out.K.selfadjointView<Eigen::Lower>();
  // Factor through QR of the stacked square root [V^{-1/2}; Uw]. Forming K and
  // calling LLT loses definiteness when exp(-h) spans many orders of magnitude.
  Eigen::MatrixXd stacked(n + T, n);
  stacked.topRows(n) = prior_var.cwiseSqrt().cwiseInverse().asDiagonal();
  stacked.bottomRows(T) = Uw;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(stacked);
  Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!(std::abs(R(j, j)) > 0.0) || !std::isfinite(R(j, j))) {
      throw NumericalError("B0 row precision is not positive definite");
    }
    if (R(j, j) < 0.0) R.row(j) *= -1.0;
  }
  const double Td = static_cast<double>(std::max<Eigen::Index>(T, 1));
  out.C = R.transpose() / std::sqrt(Td);
  const Eigen::VectorXd rhs = prior_mean.cwiseQuotient(prior_var);
  out.bhat = R.triangularView<Eigen::Upper>().solve(R.transpose().triangularView<Eigen::Lower>().solve(rhs));
  const Eigen::VectorXd perp = complement_of_other_rows(B0, row);
  Eigen::VectorXd v1 = out.C.triangularView<Eigen::Lower>().solve(perp);
  v1 /= v1.norm();
  out.v = basis_with_first(v1);
  out.xi_hat = out.v.transpose() * (out.C.transpose() * out.bhat);
  return out;
}

Eigen::VectorXd sample_b0_row(const Eigen::MatrixXd& U, const Eigen::VectorXd& h_i, const Eigen::MatrixXd& B0, int row,
                              const Eigen::VectorXd& prior_mean, const Eigen::VectorXd& prior_var, Rng& rng,
                              AnBackend backend) {
  const B0RowBasis basis = b0_row_basis(U, h_i, B0, row, prior_mean, prior_var);
  const Eigen::Index n = B0.rows();
  const double Td = static_cast<double>(std::max<Eigen::Index>(U.rows(), 1));
  const double sd = 1.0 / std::sqrt(Td);

  // Coordinates of the current row in the rotated basis. The stored row is
  // sign-normalized; pick b or -b with their conditional odds so the MH step
  // sees a draw from the unfolded conditional.
  Eigen::VectorXd xi_cur = basis.v.transpose() * (basis.C.transpose() * B0.row(row).transpose());
  if (backend == AnBackend::metropolis) {
    const double log_odds = 2.0 * Td * xi_cur.dot(basis.xi_hat);
    const double p_keep = log_odds >= 0.0 ? 1.0 / (1.0 + std::exp(-log_odds))
                                          : std::exp(log_odds) / (1.0 + std::exp(log_odds));
    if (!(rng.uniform() < p_keep)) xi_cur = -xi_cur;
  }

  Eigen::VectorXd xi(n);
  xi[0] = sample_absolute_normal(rng, {basis.xi_hat[0], 1.0 / Td}, xi_cur[0], backend);
  for (Eigen::Index j = 1; j < n; ++j) xi[j] = basis.xi_hat[j] + sd * rng.normal();

  Eigen::VectorXd b = basis.C.transpose().triangularView<Eigen::Upper>().solve(basis.v * xi);
  if (b[row] < 0.0) b = -b;
  return b;
}

Eigen::VectorXd sample_b0_lower_row(const Eigen::MatrixXd& U, const Eigen::VectorXd& h_i, int row,
                                    const Eigen::VectorXd& prior_mean, const Eigen::VectorXd& prior_var, Rng& rng) {
  if (row == 0) return Eigen::VectorXd(0);
  const Eigen::Index T = U.rows();
  const Eigen::VectorXd w = (-h_i.array()).exp().sqrt().matrix();
  const Eigen::MatrixXd Z = w.asDiagonal() * U.leftCols(row);
  const Eigen::VectorXd target = -(w.asDiagonal() * U.col(row));
  Eigen::MatrixXd K = prior_var.head(row).cwiseInverse().asDiagonal();
  K.noalias() += Z.transpose() * Z;
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) throw NumericalError("triangular B0 row precision is not positive definite");
  const Eigen::VectorXd mean =
      llt.solve(prior_mean.head(row).cwiseQuotient(prior_var.head(row)) + Z.transpose() * target);
  (void)T;
  return mean + llt.matrixU().solve(rng.normal_vector(row));
}

void sample_b0(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts, ChainState& state) {
  if (opts.structure == ImpactStructure::unit_lower_triangular) {
    sample_b0_lower(data, priors, state);
    return;
  }
  const Eigen::MatrixXd U = residuals(data, state.params);
  auto& B0 = state.params.B0;
  for (int i = 0; i < B0.rows(); ++i) {
    B0.row(i) = sample_b0_row(U, state.h.h.col(i), B0, i, priors.b0.mean.row(i).transpose(),
                              priors.b0.var.row(i).transpose(), state.rng, opts.an_backend)
                    .transpose();
  }
}

void sample_b0_lower(const EstimationData& data, const PriorSet& priors, ChainState& state) {
  const Eigen::MatrixXd U = residuals(data, state.params);
  auto& B0 = state.params.B0;
  const int n = static_cast<int>(B0.rows());
  B0.setIdentity();
  for (int i = 1; i < n; ++i) {
    B0.row(i).head(i) = sample_b0_lower_row(U, state.h.h.col(i), i, priors.b0.mean.row(i).transpose(),
                                             priors.b0.var.row(i).transpose(), state.rng)
                            .transpose();
  }
}

Eigen::VectorXd CoefConditional::mean() const { return precision.llt().solve(rhs); }

namespace {

// Z = B0 (y_t - A_{i=0}' x_t) stacked as rows, i.e. U with column i replaced by Y_i, times B0'.
CoefConditional coef_conditional_from(const EstimationData& data, const PriorSet& priors, const ChainState& state,
                                      const Eigen::MatrixXd& U, const Eigen::ArrayXXd& inv_d, int i) {
  const auto& B0 = state.params.B0;
  Eigen::MatrixXd Ui = U;
  Ui.col(i) = data.Y.col(i);
  const Eigen::MatrixXd Z = Ui * B0.transpose();
  const Eigen::VectorXd b = B0.col(i);
  const Eigen::VectorXd w = inv_d.matrix() * b.cwiseAbs2();
  const Eigen::VectorXd g = (inv_d * Z.array()).matrix() * b;

  const Eigen::VectorXd prior_var = conditional_coef_variance(priors.coef, state.hs, i);
  CoefConditional out;
  const Eigen::MatrixXd Xw = w.cwiseSqrt().asDiagonal() * data.X;
  out.precision = prior_var.cwiseInverse().asDiagonal();
  out.precision.selfadjointView<Eigen::Lower>().rankUpdate(Xw.transpose());
  out.precision = out.precision.selfadjointView<Eigen::Lower>();
  out.rhs = priors.coef.m.col(i).cwiseQuotient(prior_var);
  out.rhs.noalias() += data.X.transpose() * g;
  return out;
}

}  // namespace

CoefConditional var_coef_conditional(const EstimationData& data, const PriorSet& priors, const ChainState& state,
                                     int equation) {
  const Eigen::MatrixXd U = residuals(data, state.params);
  const Eigen::ArrayXXd inv_d = (-state.h.h.array()).exp();
  return coef_conditional_from(data, priors, state, U, inv_d, equation);
}

void sample_var_coeffs(const EstimationData& data, const PriorSet& priors, ChainState& state) {
  Eigen::MatrixXd U = residuals(data, state.params);
  const Eigen::ArrayXXd inv_d = (-state.h.h.array()).exp();
  const int n = state.params.n();
  for (int i = 0; i < n; ++i) {
    const CoefConditional cond = coef_conditional_from(data, priors, state, U, inv_d, i);
    Eigen::LLT<Eigen::MatrixXd> llt(cond.precision);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("coefficient precision of equation " + std::to_string(i) + " is not positive definite");
    }
    const Eigen::VectorXd mean = llt.solve(cond.rhs);
    const Eigen::VectorXd alpha = mean + llt.matrixU().solve(state.rng.normal_vector(mean.size()));
    state.params.A.col(i) = alpha;
    U.col(i) = data.Y.col(i) - data.X * alpha;
  }
}

void sample_psi(const PriorSet& priors, ChainState& state) {
  const auto& cfg = priors.coef;
  auto& hs = state.hs;
  const auto& A = state.params.A;
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    for (Eigen::Index r = 1; r < A.rows(); ++r) {
      const double kappa = cfg.own_lag_mask(r, i) ? hs.kappa1 : hs.kappa2;
      const double d = A(r, i) - cfg.m(r, i);
      const double scale = 1.0 / hs.z_psi(r, i) + d * d / (2.0 * kappa * cfg.C(r, i));
      hs.psi(r, i) = state.rng.inverse_gamma(1.0, scale);
    }
  }
}

void sample_kappa(const PriorSet& priors, ChainState& state) {
  const auto& cfg = priors.coef;
  auto& hs = state.hs;
  const auto& A = state.params.A;
  double ss[2] = {0.0, 0.0};
  int count[2] = {0, 0};
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    for (Eigen::Index r = 1; r < A.rows(); ++r) {
      const int g = cfg.own_lag_mask(r, i) ? 0 : 1;
      const double d = A(r, i) - cfg.m(r, i);
      ss[g] += d * d / (2.0 * hs.psi(r, i) * cfg.C(r, i));
      ++count[g];
    }
  }
  hs.kappa1 = state.rng.inverse_gamma(0.5 * (count[0] + 1), 1.0 / hs.z_k1 + ss[0]);
  hs.kappa2 = state.rng.inverse_gamma(0.5 * (count[1] + 1), 1.0 / hs.z_k2 + ss[1]);
}

void sample_latent_z(ChainState& state) {
  auto& hs = state.hs;
  for (Eigen::Index i = 0; i < hs.psi.cols(); ++i)
    for (Eigen::Index r = 1; r < hs.psi.rows(); ++r)
      hs.z_psi(r, i) = state.rng.inverse_gamma(1.0, 1.0 + 1.0 / hs.psi(r, i));
  hs.z_k1 = state.rng.inverse_gamma(1.0, 1.0 + 1.0 / hs.kappa1);
  hs.z_k2 = state.rng.inverse_gamma(1.0, 1.0 + 1.0 / hs.kappa2);
}

void sample_h(const EstimationData& data, const SamplerOptions& opts, ChainState& state) {
  const Eigen::MatrixXd E = residuals(data, state.params) * state.params.B0.transpose();
  for (Eigen::Index i = 0; i < E.cols(); ++i) {
    LogVolDraw d = sample_log_vol(E.col(i), state.h.h.col(i), state.params.phi[i], state.params.omega2[i],
                                  opts.log_offset, opts.sv_correction, state.rng);
    state.h.h.col(i) = d.h;
    state.mix_indicators.col(i) = d.indicators;
  }
}

void sample_omega2(const PriorSet& priors, ChainState& state) {
  const auto& H = state.h.h;
  const Eigen::Index T = H.rows();
  for (Eigen::Index i = 0; i < H.cols(); ++i) {
    const double phi = state.params.phi[i];
    double ss = (1.0 - phi * phi) * H(0, i) * H(0, i);
    for (Eigen::Index t = 1; t < T; ++t) {
      const double e = H(t, i) - phi * H(t - 1, i);
      ss += e * e;
    }
    state.params.omega2[i] =
        state.rng.inverse_gamma(priors.sv.nu[i] + 0.5 * static_cast<double>(T), priors.sv.S[i] + 0.5 * ss);
  }
}

void sample_phi(const PriorSet& priors, ChainState& state) {
  const auto& H = state.h.h;
  const Eigen::Index T = H.rows();
  for (Eigen::Index i = 0; i < H.cols(); ++i) {
    const double omega2 = state.params.omega2[i];
    const double phi0 = priors.sv.phi0[i];
    const double vphi = priors.sv.vphi[i];
    double sxx = 0.0;
    double sxy = 0.0;
    for (Eigen::Index t = 1; t < T; ++t) {
      sxx += H(t - 1, i) * H(t - 1, i);
      sxy += H(t, i) * H(t - 1, i);
    }
    const double prec = 1.0 / vphi + sxx / omega2;
    const double cur = state.params.phi[i];
    double proposal;
    double log_ratio;
    if (1.0 / prec < 1.0) {
      const double mean = (phi0 / vphi + sxy / omega2) / prec;
      proposal = state.rng.truncated_normal(mean, std::sqrt(1.0 / prec), -1.0, 1.0);
      log_ratio = log_ic_factor(proposal, H(0, i), omega2) - log_ic_factor(cur, H(0, i), omega2);
    } else {
      // Diffuse conditional: propose from the truncated prior, weigh by the full likelihood.
      proposal = state.rng.truncated_normal(phi0, std::sqrt(vphi), -1.0, 1.0);
      auto loglik = [&](double phi) {
        return log_ic_factor(phi, H(0, i), omega2) - 0.5 * (phi * phi * sxx - 2.0 * phi * sxy) / omega2;
      };
      log_ratio = loglik(proposal) - loglik(cur);
    }
    if (std::log(state.rng.uniform()) < log_ratio) state.params.phi[i] = proposal;
  }
}

void gibbs_sweep(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts, ChainState& state) {
  int step = 0;
  try {
    step = 1;
    sample_b0(data, priors, opts, state);
    step = 2;
    sample_var_coeffs(data, priors, state);
    step = 3;
    sample_psi(priors, state);
    step = 4;
    sample_kappa(priors, state);
    step = 5;
    sample_latent_z(state);
    step = 7;
    sample_h(data, opts, state);
    step = 8;
    sample_omega2(priors, state);
    step = 9;
    sample_phi(priors, state);
  } catch (const StepError&) {
    throw;
  } catch (const std::exception& e) {
    throw StepError(step, e.what());
  }
}

PriorSet default_priors(const Eigen::MatrixXd& series, int p, const std::vector<bool>& level_flags,
                        ImpactStructure structure) {
  PriorSet out;
  out.coef = make_minnesota_config(series, p, level_flags);
  const int n = static_cast<int>(series.cols());
  out.b0 = structure == ImpactStructure::unrestricted ? B0Prior::unrestricted(n) : B0Prior::lower_triangular(n);
  out.sv = SvPrior::defaults(n);
  return out;
}

namespace {

struct ChainResult {
  std::vector<Draw> draws;
  std::vector<double> seconds;
};

ChainResult run_chain(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts,
                      const McmcConfig& cfg, int chain) {
  ChainResult out;
  ChainState state = initial_state(data, priors, cfg.seed, static_cast<std::uint64_t>(chain));
  const int total = cfg.burn + cfg.draws * cfg.thin;
  out.seconds.reserve(static_cast<std::size_t>(total));
  out.draws.reserve(static_cast<std::size_t>(cfg.draws));
  for (int it = 0; it < total; ++it) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      gibbs_sweep(data, priors, opts, state);
    } catch (const StepError& e) {
      throw StepError(e.step(), std::string(e.what()) + " (chain " + std::to_string(chain) + ", sweep " +
                                    std::to_string(it) + ")" + dump_state(state));
    }
    out.seconds.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    if (it >= cfg.burn && (it - cfg.burn + 1) % cfg.thin == 0) {
      Draw d;
      d.params = state.params;
      if (cfg.keep_paths) d.h = state.h;
      d.h_last = state.h.h.row(state.h.h.rows() - 1);
      d.hs = state.hs;
      out.draws.push_back(std::move(d));
    }
  }
  return out;
}

}  // namespace

PosteriorSample run_mcmc(const EstimationData& data, const PriorSet& priors, const SamplerOptions& opts,
                         const McmcConfig& cfg) {
  if (cfg.burn < 0 || cfg.draws < 0 || cfg.thin < 1 || cfg.chains < 1) {
    throw InputError("run_mcmc: burn, draws >= 0, thin, chains >= 1 required");
  }
  const ModelDims d = data.dims();
  if (d.T < 1) throw InputError("run_mcmc: empty estimation sample");
  if (data.X.cols() != d.k() || data.X.rows() != d.T) throw InputError("run_mcmc: X has the wrong shape");
  PosteriorSample out;
  out.dims = d;
  out.meta.seed = cfg.seed;
  out.meta.burn = cfg.burn;
  out.meta.thin = cfg.thin;
  out.meta.chains = cfg.chains;
  out.meta.structure = opts.structure;
  out.meta.ordering = PermutationMap::identity(d.n).indices();

  std::vector<ChainResult> results(static_cast<std::size_t>(cfg.chains));
  if (cfg.chains == 1) {
    results[0] = run_chain(data, priors, opts, cfg, 0);
  } else {
    std::vector<std::exception_ptr> errors(results.size());
    std::vector<std::thread> workers;
    for (int c = 0; c < cfg.chains; ++c) {
      workers.emplace_back([&, c] {
        try {
          results[static_cast<std::size_t>(c)] = run_chain(data, priors, opts, cfg, c);
        } catch (...) {
          errors[static_cast<std::size_t>(c)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  for (auto& r : results) {
    out.draws.insert(out.draws.end(), std::make_move_iterator(r.draws.begin()), std::make_move_iterator(r.draws.end()));
    out.meta.sweep_seconds.insert(out.meta.sweep_seconds.end(), r.seconds.begin(), r.seconds.end());
  }
  return out;
}

PosteriorSample run_mcmc_cs(const EstimationData& data, const PriorSet& priors, const McmcConfig& cfg) {
  SamplerOptions opts;
  opts.structure = ImpactStructure::unit_lower_triangular;
  return run_mcmc(data, priors, opts, cfg);
}

}  // namespace oivar
