#include "oivar/forecast.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <limits>
#include <numbers>
#include <thread>
#include <tuple>

#include <boost/math/distributions/normal.hpp>

#include "json.hpp"
#include "oivar/diagnostics.hpp"
#include "oivar/errors.hpp"

namespace oivar {

namespace {

constexpr double kDensityFloor = 1e-300;

PredictivePath simulate_forward(const VarSvParams& par, const Eigen::MatrixXd& B0inv, const Eigen::RowVectorXd& h_last,
                                const Eigen::MatrixXd& history, int horizon, Rng& rng, bool shocks) {
  const int n = par.n();
  const int p = par.p();
  if (history.rows() < p) throw InputError("forecast: history shorter than the lag order");
  if (horizon < 1) throw InputError("forecast: horizon must be at least 1");
  Eigen::MatrixXd buf(p + horizon, n);
  buf.topRows(p) = history.bottomRows(p);
  PredictivePath out;
  out.y.resize(horizon, n);
  out.h.resize(horizon, n);
  out.mean.reserve(static_cast<std::size_t>(horizon));
  out.cov.reserve(static_cast<std::size_t>(horizon));
  Eigen::VectorXd hcur = h_last.transpose();
  Eigen::RowVectorXd x(n * p + 1);
  x[0] = 1.0;
  for (int s = 0; s < horizon; ++s) {
    for (int i = 0; i < n; ++i) hcur[i] = par.phi[i] * hcur[i] + std::sqrt(par.omega2[i]) * rng.normal();
    for (int l = 1; l <= p; ++l) x.segment(1 + (l - 1) * n, n) = buf.row(p + s - l);
    Eigen::VectorXd mu = (x * par.A).transpose();
    const Eigen::VectorXd sd = (0.5 * hcur.array()).exp();
    Eigen::MatrixXd L = B0inv * sd.asDiagonal();
    Eigen::MatrixXd cov = L * L.transpose();
    Eigen::VectorXd y = mu;
    if (shocks) y += L * rng.normal_vector(n);
    buf.row(p + s) = y.transpose();
    out.y.row(s) = y.transpose();
    out.h.row(s) = hcur.transpose();
    out.mean.push_back(std::move(mu));
    out.cov.push_back(std::move(cov));
  }
  return out;
}

double normal_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return std::exp(-0.5 * z * z / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::json dm_json(const DmResult& r) {
  nlohmann::json j;
  j["defined"] = r.defined;
  j["statistic"] = r.defined ? nlohmann::json(r.statistic) : nlohmann::json();
  j["p_value"] = r.defined ? nlohmann::json(r.p_value) : nlohmann::json();
  return j;
}

}  // namespace

PredictivePath predictive_path(const VarSvParams& params, const Eigen::RowVectorXd& h_last,
                               const Eigen::MatrixXd& history, int horizon, Rng& rng, bool shocks) {
  const Eigen::MatrixXd B0inv = params.B0.partialPivLu().inverse();
  return simulate_forward(params, B0inv, h_last, history, horizon, rng, shocks);
}

DmResult dm_test(std::span<const double> loss_benchmark, std::span<const double> loss_alt, int horizon) {
  if (loss_benchmark.size() != loss_alt.size()) throw InputError("dm_test: loss series differ in length");
  if (loss_benchmark.size() < 10) throw InputError("dm_test: need at least 10 losses");
  if (horizon < 1) throw InputError("dm_test: horizon must be at least 1");
  const std::size_t M = loss_benchmark.size();
  std::vector<double> d(M);
  for (std::size_t t = 0; t < M; ++t) d[t] = loss_benchmark[t] - loss_alt[t];
  DmResult r;
  r.mean_diff = mean_of(d);
  auto gamma = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t t = lag; t < M; ++t) s += (d[t] - r.mean_diff) * (d[t - lag] - r.mean_diff);
    return s / static_cast<double>(M);
  };
  double V = gamma(0);
  for (int l = 1; l < horizon && static_cast<std::size_t>(l) < M; ++l) {
    V += 2.0 * (1.0 - static_cast<double>(l) / horizon) * gamma(static_cast<std::size_t>(l));
  }
  r.long_run_variance = V;
  if (!(V > 0.0)) {
    if (r.mean_diff == 0.0) {
      r.statistic = 0.0;
      r.p_value = 1.0;
    } else {
      r.defined = false;
      r.statistic = std::numeric_limits<double>::quiet_NaN();
      r.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  }
  r.statistic = r.mean_diff / std::sqrt(V / static_cast<double>(M));
  const boost::math::normal_distribution<double> N01;
  r.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(N01, std::abs(r.statistic))));
  return r;
}

double rmsfe(std::span<const double> errors) {
  if (errors.empty()) throw InputError("rmsfe: no forecast errors");
  double s = 0.0;
  for (double e : errors) s += e * e;
  return std::sqrt(s / static_cast<double>(errors.size()));
}

OriginForecast forecast_origin(const PosteriorSample& post, const Eigen::MatrixXd& history,
                               const Eigen::MatrixXd& future, const std::vector<int>& horizons, int paths_per_draw,
                               Rng& rng) {
  if (post.empty()) throw InputError("forecast: empty posterior sample");
  if (horizons.empty()) throw InputError("forecast: no horizons");
  if (paths_per_draw < 1) throw InputError("forecast: paths_per_draw must be at least 1");
  const int n = post.dims.n;
  const int H = *std::max_element(horizons.begin(), horizons.end());
  const int nh = static_cast<int>(horizons.size());
  const std::size_t D = post.size();

  Eigen::MatrixXd point_sum = Eigen::MatrixXd::Zero(nh, n);
  // per draw density averaged over its paths, for every (horizon, variable)
  std::vector<Eigen::MatrixXd> dens(D, Eigen::MatrixXd::Zero(nh, n));
  for (std::size_t d = 0; d < D; ++d) {
    const Draw& dr = post.draws[d];
    const Eigen::MatrixXd B0inv = dr.params.B0.partialPivLu().inverse();
    for (int r = 0; r < paths_per_draw; ++r) {
      const PredictivePath path = simulate_forward(dr.params, B0inv, dr.h_last, history, H, rng, true);
      for (int a = 0; a < nh; ++a) {
        const int s = horizons[static_cast<std::size_t>(a)] - 1;
        point_sum.row(a) += path.y.row(s);
        if (s >= future.rows()) continue;
        for (int i = 0; i < n; ++i) {
          dens[d](a, i) += normal_pdf(future(s, i), path.mean[static_cast<std::size_t>(s)][i],
                                      path.cov[static_cast<std::size_t>(s)](i, i));
        }
      }
    }
    dens[d] /= paths_per_draw;
  }

  OriginForecast out;
  out.horizons = horizons;
  out.point = point_sum / static_cast<double>(D * static_cast<std::size_t>(paths_per_draw));
  out.log_density = Eigen::MatrixXd::Constant(nh, n, std::numeric_limits<double>::quiet_NaN());
  out.log_density_se = out.log_density;
  std::vector<double> series(D);
  for (int a = 0; a < nh; ++a) {
    if (horizons[static_cast<std::size_t>(a)] > future.rows()) continue;
    for (int i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < D; ++d) series[d] = dens[d](a, i);
      const double m = mean_of(series);
      if (!(m > kDensityFloor)) {
        out.log_density(a, i) = std::log(kDensityFloor);
        out.log_density_se(a, i) = 0.0;
        ++out.floored;
        continue;
      }
      out.log_density(a, i) = std::log(m);
      // delta method on the batch-means error of the averaged density
      const int batches = static_cast<int>(std::min<std::size_t>(40, std::max<std::size_t>(D / 5, 1)));
      out.log_density_se(a, i) = D >= 10 ? batch_means_se(series, batches) / m : 0.0;
    }
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

PosteriorSample estimate_model(const Dataset& data, int rows, const ModelSpec& model, const McmcConfig& mcmc,
                               const PriorOverrides& overrides, const SamplerOptions& sampler) {
  const int n = data.n();
  const PermutationMap P = model.ordering.empty() ? PermutationMap::identity(n) : PermutationMap(model.ordering);
  if (P.size() != n) throw InputError("model '" + model.name + "': ordering has the wrong size");
  if (rows > data.transformed.rows() || rows <= model.p) throw InputError("estimate_model: bad sample size");
  const Eigen::MatrixXd series = P.permute_columns(data.transformed.topRows(rows));
  std::vector<bool> levels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) levels[static_cast<std::size_t>(i)] = data.level_flags[static_cast<std::size_t>(P[i])];
  PriorSet priors = default_priors(series, model.p, levels, model.structure);
  apply_overrides(priors, overrides);
  const EstimationData ed = make_estimation_data(series, model.p);
  SamplerOptions opts = sampler;
  opts.structure = model.structure;
  PosteriorSample post = run_mcmc(ed, priors, opts, mcmc);
  post.meta.ordering = P.indices();
  return post;
}

const ForecastRow& ForecastTable::row(const std::string& model, const std::string& variable, int horizon) const {
  for (const auto& r : rows) {
    if (r.model == model && r.variable == variable && r.horizon == horizon) return r;
  }
  throw InputError("forecast table has no row for " + model + "/" + variable + "/h=" + std::to_string(horizon));
}

void ForecastTable::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "model,variable,horizon,origins,rmsfe,alpl,alpl_se,dm_rmsfe_stat,dm_rmsfe_p,dm_alpl_stat,dm_alpl_p\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.variable << ',' << r.horizon << ',' << r.origins << ',' << fmt(r.rmsfe) << ','
        << fmt(r.alpl) << ',' << fmt(r.alpl_se) << ',' << (r.dm_rmsfe.defined ? fmt(r.dm_rmsfe.statistic) : "NA")
        << ',' << (r.dm_rmsfe.defined ? fmt(r.dm_rmsfe.p_value) : "NA") << ','
        << (r.dm_alpl.defined ? fmt(r.dm_alpl.statistic) : "NA") << ','
        << (r.dm_alpl.defined ? fmt(r.dm_alpl.p_value) : "NA") << '\n';
  }
}

void ForecastTable::write_records_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "model,origin,variable,horizon,point,actual,log_density,log_density_se\n";
  for (const auto& r : records) {
    out << r.model << ',' << r.origin << ',' << r.variable << ',' << r.horizon << ',' << fmt(r.point) << ','
        << fmt(r.actual) << ',' << fmt(r.log_density) << ',' << fmt(r.log_density_se) << '\n';
  }
}

void ForecastTable::write_json(const std::string& path) const {
  nlohmann::json j;
  j["benchmark"] = benchmark;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"model", r.model},
                         {"variable", r.variable},
                         {"horizon", r.horizon},
                         {"origins", r.origins},
                         {"rmsfe", r.rmsfe},
                         {"alpl", r.alpl},
                         {"alpl_se", r.alpl_se},
                         {"dm_rmsfe", dm_json(r.dm_rmsfe)},
                         {"dm_alpl", dm_json(r.dm_alpl)}});
  }
  j["log"] = log;
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump(2) << '\n';
}

ForecastTable recursive_eval(const Dataset& data, const std::vector<ModelSpec>& models, const ForecastConfig& cfg) {
  if (models.empty()) throw InputError("recursive_eval: no models");
  if (cfg.benchmark >= models.size()) throw InputError("recursive_eval: benchmark index out of range");
  if (cfg.horizons.empty()) throw InputError("recursive_eval: no horizons");
  for (int h : cfg.horizons) {
    if (h < 1) throw InputError("recursive_eval: horizons must be at least 1");
  }
  if (cfg.origin_step < 1 || cfg.reestimate_every < 1) throw InputError("recursive_eval: steps must be positive");
  const int Tall = static_cast<int>(data.transformed.rows());
  const int n = data.n();
  const int Hmax = *std::max_element(cfg.horizons.begin(), cfg.horizons.end());
  const int last = cfg.last_origin >= 0 ? cfg.last_origin : Tall - Hmax;
  std::vector<int> origins;
  for (int o = cfg.first_origin; o <= last; o += cfg.origin_step) origins.push_back(o);
  if (origins.empty()) throw InputError("recursive_eval: no evaluation origins");
  std::vector<int> targets = cfg.targets;
  if (targets.empty()) {
    for (int i = 0; i < n; ++i) targets.push_back(i);
  }

  ForecastTable table;
  table.benchmark = models[cfg.benchmark].name;

  // Blocks of origins that share one estimation.
  struct Job {
    std::size_t model;
    std::size_t start;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (std::size_t b = 0; b < origins.size(); b += static_cast<std::size_t>(cfg.reestimate_every)) jobs.push_back({m, b});
  }
  std::vector<std::vector<ForecastRecord>> results(jobs.size());
  std::vector<std::vector<std::string>> logs(jobs.size());

  auto run_job = [&](std::size_t j) {
    const Job job = jobs[j];
    const ModelSpec& model = models[job.model];
    const int est_origin = origins[job.start];
    McmcConfig mc = cfg.mcmc;
    mc.seed = derive_seed(cfg.mcmc.seed, job.model, static_cast<std::uint64_t>(est_origin));
    mc.keep_paths = false;
    PosteriorSample post;
    try {
      post = estimate_model(data, est_origin, model, mc, cfg.priors, cfg.sampler);
    } catch (const std::exception& e) {
      logs[j].push_back(model.name + ": estimation failed at origin " + std::to_string(est_origin) + ": " + e.what());
      return;
    }
    const PermutationMap P = PermutationMap(post.meta.ordering);
    const PermutationMap Pinv = P.inverse();
    Rng rng(mc.seed, 7);
    const std::size_t stop = std::min(origins.size(), job.start + static_cast<std::size_t>(cfg.reestimate_every));
    int advanced = est_origin;
    for (std::size_t oi = job.start; oi < stop; ++oi) {
      const int o = origins[oi];
      // carried-forward draws: move the terminal volatilities to the new origin
      for (; advanced < o; ++advanced) {
        for (auto& d : post.draws) {
          for (int i = 0; i < n; ++i) {
            d.h_last[i] = d.params.phi[i] * d.h_last[i] + std::sqrt(d.params.omega2[i]) * rng.normal();
          }
        }
      }
      const Eigen::MatrixXd history = P.permute_columns(data.transformed.topRows(o));
      const int avail = std::min(Hmax, Tall - o);
      const Eigen::MatrixXd future = P.permute_columns(data.transformed.middleRows(o, avail));
      for (int h : cfg.horizons) {
        if (h > avail) {
          logs[j].push_back(model.name + ": origin " + std::to_string(o) + " lacks data for h=" + std::to_string(h));
        }
      }
      OriginForecast fc;
      try {
        fc = forecast_origin(post, history, future, cfg.horizons, cfg.paths_per_draw, rng);
      } catch (const std::exception& e) {
        logs[j].push_back(model.name + ": forecast failed at origin " + std::to_string(o) + ": " + e.what());
        continue;
      }
      if (fc.floored > 0) {
        logs[j].push_back(model.name + ": origin " + std::to_string(o) + ": " + std::to_string(fc.floored) +
                          " predictive densities floored");
      }
      for (std::size_t a = 0; a < cfg.horizons.size(); ++a) {
        const int h = cfg.horizons[a];
        if (h > avail) continue;
        for (int v : targets) {
          // variable v in the data ordering sits at position Pinv[v] in the model ordering
          const int pos = Pinv[v];
          ForecastRecord r;
          r.model = model.name;
          r.origin = o;
          r.variable = v;
          r.horizon = h;
          r.point = fc.point(static_cast<Eigen::Index>(a), pos);
          r.actual = data.transformed(o + h - 1, v);
          r.log_density = fc.log_density(static_cast<Eigen::Index>(a), pos);
          r.log_density_se = fc.log_density_se(static_cast<Eigen::Index>(a), pos);
          results[j].push_back(r);
        }
      }
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(j);
  };
  const int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    table.records.insert(table.records.end(), results[j].begin(), results[j].end());
    table.log.insert(table.log.end(), logs[j].begin(), logs[j].end());
  }

  // (model, variable, horizon) -> origin -> record
  std::map<std::tuple<std::size_t, int, int>, std::map<int, const ForecastRecord*>> index;
  std::map<std::string, std::size_t> model_idx;
  for (std::size_t m = 0; m < models.size(); ++m) model_idx[models[m].name] = m;
  for (const auto& r : table.records) index[{model_idx[r.model], r.variable, r.horizon}][r.origin] = &r;

  for (std::size_t m = 0; m < models.size(); ++m) {
    for (int v : targets) {
      for (int h : cfg.horizons) {
        const auto& mine = index[{m, v, h}];
        if (mine.empty()) continue;
        ForecastRow row;
        row.model = models[m].name;
        row.variable = data.names[static_cast<std::size_t>(v)];
        row.horizon = h;
        row.origins = static_cast<int>(mine.size());
        std::vector<double> err;
        double lpl = 0.0;
        double se2 = 0.0;
        for (const auto& [o, r] : mine) {
          err.push_back(r->point - r->actual);
          lpl += r->log_density;
          se2 += r->log_density_se * r->log_density_se;
        }
        row.rmsfe = rmsfe(err);
        row.alpl = lpl / row.origins;
        row.alpl_se = std::sqrt(se2) / row.origins;
        const auto& bench = index[{cfg.benchmark, v, h}];
        std::vector<double> lb_sq, la_sq, lb_ls, la_ls;
        for (const auto& [o, r] : mine) {
          auto it = bench.find(o);
          if (it == bench.end()) continue;
          const double eb = it->second->point - it->second->actual;
          const double ea = r->point - r->actual;
          lb_sq.push_back(eb * eb);
          la_sq.push_back(ea * ea);
          lb_ls.push_back(-it->second->log_density);
          la_ls.push_back(-r->log_density);
        }
        if (lb_sq.size() >= 10) {
          row.dm_rmsfe = dm_test(lb_sq, la_sq, h);
          row.dm_alpl = dm_test(lb_ls, la_ls, h);
        } else {
          row.dm_rmsfe.defined = row.dm_alpl.defined = false;
          table.log.push_back(row.model + "/" + row.variable + "/h=" + std::to_string(h) +
                              ": fewer than 10 common origins for the DM test");
        }
        table.rows.push_back(row);
      }
    }
  }
  return table;
}

}  // namespace oivar
