#include "oivar/summary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "oivar/dataset.hpp"
#include "oivar/diagnostics.hpp"
#include "oivar/errors.hpp"

namespace oivar {

namespace {

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

constexpr int kBatches = 40;

}  // namespace

int sigma_column(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::vector<std::string> sigma_columns(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i; j < names.size(); ++j) out.push_back("s_" + names[i] + "_" + names[j]);
  return out;
}

PosteriorSummary summarize(const PosteriorSample& sample, const std::vector<std::string>& names) {
  if (sample.empty()) throw InputError("summarize: empty posterior sample");
  const int n = sample.dims.n;
  if (static_cast<int>(names.size()) != n) throw InputError("summarize: wrong number of variable names");
  const PermutationMap P = sample.meta.ordering.empty() ? PermutationMap::identity(n) : PermutationMap(sample.meta.ordering);
  const PermutationMap back = P.inverse();
  const std::size_t D = sample.size();

  PosteriorSummary s;
  s.names = names;
  s.dims = sample.dims;
  s.draws = D;
  s.structure = sample.meta.structure;
  s.A_mean = Eigen::MatrixXd::Zero(sample.dims.k(), n);
  s.B0_mean = Eigen::MatrixXd::Zero(n, n);
  s.phi_mean = Eigen::VectorXd::Zero(n);
  s.omega2_mean = Eigen::VectorXd::Zero(n);
  s.sigma_uncond_mean = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::vector<double>> b0_vals(static_cast<std::size_t>(n * n), std::vector<double>(D));
  std::vector<double> k1(D), k2(D);

  const bool paths = sample.has_paths();
  const int T = sample.dims.T;
  const int m = n * (n + 1) / 2;
  const std::size_t nb = std::clamp<std::size_t>(kBatches, 1, std::max<std::size_t>(1, D / 2));
  const std::size_t blen = D / nb;
  std::vector<Eigen::MatrixXd> batch;
  if (paths) {
    s.sigma_mean = Eigen::MatrixXd::Zero(T, m);
    batch.assign(nb, Eigen::MatrixXd::Zero(T, m));
  }

  for (std::size_t d = 0; d < D; ++d) {
    const Draw& dr = sample.draws[d];
    const Eigen::MatrixXd B0 = back.conjugate(dr.params.B0);
    s.A_mean += back.permute_coefficients(dr.params.A);
    s.B0_mean += B0;
    s.phi_mean += back.permute_vector(dr.params.phi);
    s.omega2_mean += back.permute_vector(dr.params.omega2);
    s.sigma_uncond_mean += unconditional_covariance(B0, back.permute_vector(dr.params.phi), back.permute_vector(dr.params.omega2));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b0_vals[static_cast<std::size_t>(i * n + j)][d] = B0(i, j);
    k1[d] = dr.hs.kappa1;
    k2[d] = dr.hs.kappa2;
    if (paths) {
      const auto path = reduced_form_cov_path(dr.params.B0, dr.h);
      Eigen::MatrixXd flat(T, m);
      for (int t = 0; t < T; ++t) {
        const Eigen::MatrixXd S = back.conjugate(path[static_cast<std::size_t>(t)]);
        for (int i = 0; i < n; ++i)
          for (int j = i; j < n; ++j) flat(t, sigma_column(i, j, n)) = S(i, j);
      }
      s.sigma_mean += flat;
      if (d / blen < nb) batch[d / blen] += flat;
    }
  }
  const double Dd = static_cast<double>(D);
  s.A_mean /= Dd;
  s.B0_mean /= Dd;
  s.phi_mean /= Dd;
  s.omega2_mean /= Dd;
  s.sigma_uncond_mean /= Dd;
  s.B0_se.resize(n, n);
  s.B0_q05.resize(n, n);
  s.B0_q95.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& v = b0_vals[static_cast<std::size_t>(i * n + j)];
      s.B0_se(i, j) = batch_means_se(v, kBatches);
      s.B0_q05(i, j) = quantile(v, 0.05);
      s.B0_q95(i, j) = quantile(v, 0.95);
    }
  }
  s.kappa1_mean = mean_of(k1);
  s.kappa1_se = batch_means_se(k1, kBatches);
  s.kappa2_mean = mean_of(k2);
  s.kappa2_se = batch_means_se(k2, kBatches);
  if (paths) {
    s.sigma_mean /= Dd;
    s.sigma_se = Eigen::MatrixXd::Zero(T, m);
    if (nb >= 2) {
      Eigen::MatrixXd mean_b = Eigen::MatrixXd::Zero(T, m);
      for (auto& b : batch) {
        b /= static_cast<double>(blen);
        mean_b += b;
      }
      mean_b /= static_cast<double>(nb);
      for (const auto& b : batch) s.sigma_se.array() += (b - mean_b).array().square();
      s.sigma_se = (s.sigma_se.array() / static_cast<double>((nb - 1) * nb)).sqrt().matrix();
    }
  }
  const auto& sw = sample.meta.sweep_seconds;
  if (!sw.empty()) s.mean_sweep_seconds = std::accumulate(sw.begin(), sw.end(), 0.0) / static_cast<double>(sw.size());
  return s;
}

void write_summary_json(const std::string& path, const PosteriorSummary& s) {
  nlohmann::json j;
  j["names"] = s.names;
  j["n"] = s.dims.n;
  j["p"] = s.dims.p;
  j["T"] = s.dims.T;
  j["draws"] = s.draws;
  j["model"] = s.structure == ImpactStructure::unrestricted ? "oi" : "cs";
  j["kappa1"] = {{"mean", s.kappa1_mean}, {"mc_se", s.kappa1_se}};
  j["kappa2"] = {{"mean", s.kappa2_mean}, {"mc_se", s.kappa2_se}};
  j["B0_mean"] = to_json(s.B0_mean);
  j["B0_mc_se"] = to_json(s.B0_se);
  j["B0_q05"] = to_json(s.B0_q05);
  j["B0_q95"] = to_json(s.B0_q95);
  j["phi_mean"] = std::vector<double>(s.phi_mean.data(), s.phi_mean.data() + s.phi_mean.size());
  j["omega2_mean"] = std::vector<double>(s.omega2_mean.data(), s.omega2_mean.data() + s.omega2_mean.size());
  j["A_mean"] = to_json(s.A_mean);
  j["sigma_unconditional_mean"] = to_json(s.sigma_uncond_mean);
  j["mean_sweep_seconds"] = s.mean_sweep_seconds;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

void write_b0_csv(const std::string& path, const PosteriorSummary& s) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out.precision(10);
  out << "row,col,mean,mc_se,q05,q95\n";
  for (int i = 0; i < s.dims.n; ++i)
    for (int j = 0; j < s.dims.n; ++j)
      out << s.names[static_cast<std::size_t>(i)] << ',' << s.names[static_cast<std::size_t>(j)] << ',' << s.B0_mean(i, j)
          << ',' << s.B0_se(i, j) << ',' << s.B0_q05(i, j) << ',' << s.B0_q95(i, j) << '\n';
}

void write_sigma_csv(const std::string& path, const PosteriorSummary& s, const std::vector<std::string>& dates) {
  if (s.sigma_mean.size() == 0) throw InputError("no log-volatility paths were stored; Sigma_t is unavailable");
  std::vector<std::string> header{"date"};
  for (const auto& c : sigma_columns(s.names)) header.push_back(c);
  for (const auto& c : sigma_columns(s.names)) header.push_back(c + "_se");
  Eigen::MatrixXd both(s.sigma_mean.rows(), 2 * s.sigma_mean.cols());
  both << s.sigma_mean, s.sigma_se;
  write_matrix_csv(path, header, dates, both);
}

std::string describe(const PosteriorSummary& s) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(4);
  o << (s.structure == ImpactStructure::unrestricted ? "OI-VAR-SV" : "CS-VAR-SV") << ": n=" << s.dims.n
    << " p=" << s.dims.p << " T=" << s.dims.T << " draws=" << s.draws << '\n';
  o << "variables:";
  for (const auto& nm : s.names) o << ' ' << nm;
  o << "\nkappa1 " << s.kappa1_mean << " (mc se " << s.kappa1_se << ")\n";
  o << "kappa2 " << s.kappa2_mean << " (mc se " << s.kappa2_se << ")\n";
  o << "posterior mean of B0:\n";
  for (int i = 0; i < s.dims.n; ++i) {
    for (int j = 0; j < s.dims.n; ++j) o << (j ? " " : "  ") << s.B0_mean(i, j);
    o << '\n';
  }
  o << "phi:";
  for (int i = 0; i < s.dims.n; ++i) o << ' ' << s.phi_mean[i];
  o << "\nomega2:";
  for (int i = 0; i < s.dims.n; ++i) o << ' ' << s.omega2_mean[i];
  o << "\nunconditional covariance:\n";
  for (int i = 0; i < s.dims.n; ++i) {
    for (int j = 0; j < s.dims.n; ++j) o << (j ? " " : "  ") << s.sigma_uncond_mean(i, j);
    o << '\n';
  }
  if (s.mean_sweep_seconds > 0.0) o << "mean sweep time " << s.mean_sweep_seconds * 1e3 << " ms\n";
  return o.str();
}

}  // namespace oivar
