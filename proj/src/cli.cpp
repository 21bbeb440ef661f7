#include "oivar/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "oivar/config.hpp"
#include "oivar/dataset.hpp"
#include "oivar/dgp.hpp"
#include "oivar/draws_io.hpp"
#include "oivar/errors.hpp"
#include "oivar/forecast.hpp"
#include "oivar/sampler.hpp"
#include "oivar/summary.hpp"

namespace oivar {

namespace fs = std::filesystem;

namespace {

struct SharedFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> model;
  std::optional<std::string> ordering;
  std::optional<int> lags;
  std::optional<int> burn;
  std::optional<int> draws;
  std::optional<int> thin;
  std::optional<int> chains;
  std::optional<std::string> an_backend;
  std::optional<std::string> data;
  std::optional<std::string> codes;
  std::string out_dir = "out";
  bool no_paths = false;
  bool no_sv_correction = false;
};

void add_sampler_flags(CLI::App* cmd, SharedFlags& f) {
  cmd->add_option("--config", f.config, "key = value run configuration file");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--lags", f.lags, "VAR lag order p")->check(CLI::PositiveNumber);
  cmd->add_option("--burn", f.burn, "burn-in sweeps")->check(CLI::NonNegativeNumber);
  cmd->add_option("--draws", f.draws, "retained draws")->check(CLI::PositiveNumber);
  cmd->add_option("--thin", f.thin, "thinning interval")->check(CLI::PositiveNumber);
  cmd->add_option("--chains", f.chains, "independent chains")->check(CLI::PositiveNumber);
  cmd->add_option("--an-backend", f.an_backend, "absolute-normal sampler")->check(CLI::IsMember({"mh", "approx"}));
  cmd->add_flag("--no-sv-correction", f.no_sv_correction, "plain mixture draw of h without the MH correction");
  cmd->add_option("--data", f.data, "input CSV (date column, then one column per series)");
  cmd->add_option("--codes", f.codes, "code map CSV (mnemonic,code)");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
}

RunConfig resolve(const SharedFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) c.mcmc.seed = *f.seed;
  if (f.model) c.model = *f.model;
  if (f.ordering) c.ordering = *f.ordering;
  if (f.lags) c.p = *f.lags;
  if (f.burn) c.mcmc.burn = *f.burn;
  if (f.draws) c.mcmc.draws = *f.draws;
  if (f.thin) c.mcmc.thin = *f.thin;
  if (f.chains) c.mcmc.chains = *f.chains;
  if (f.an_backend) c.an_backend = parse_an_backend(*f.an_backend);
  if (f.data) c.data_path = *f.data;
  if (f.codes) c.codes_path = *f.codes;
  if (f.no_paths) c.mcmc.keep_paths = false;
  if (f.no_sv_correction) c.sv_correction = false;
  if (c.data_path.empty()) c.data_path = (fs::path(f.out_dir) / "data.csv").string();
  return c;
}

Dataset load_input(const RunConfig& c) {
  const CodeMap codes = c.codes_path.empty() ? CodeMap{} : read_code_map(c.codes_path);
  return load_csv(c.data_path, codes);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

// NAME=model:ordering, model:ordering or model
ModelSpec parse_model_spec(const std::string& text, int p, const std::vector<std::string>& names) {
  ModelSpec spec;
  spec.p = p;
  std::string body = text;
  const auto eq = text.find('=');
  if (eq != std::string::npos) {
    spec.name = text.substr(0, eq);
    body = text.substr(eq + 1);
  }
  const auto colon = body.find(':');
  spec.structure = parse_model(body.substr(0, colon));
  const std::string ordering = colon == std::string::npos ? "as-given" : body.substr(colon + 1);
  spec.ordering = resolve_ordering(ordering, names).indices();
  if (spec.name.empty()) spec.name = body;
  return spec;
}

int run_simulate(const SharedFlags& f, const std::string& design, std::optional<int> n_opt, std::optional<int> T_opt,
                 std::optional<std::string> sv_opt, std::ostream& out) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (f.seed) c.mcmc.seed = *f.seed;
  if (f.lags) c.p = *f.lags;
  if (!design.empty()) c.design = design;
  if (n_opt) c.sim_n = *n_opt;
  if (T_opt) c.sim_T = *T_opt;
  if (sv_opt) c.sv_on = (*sv_opt == "on");
  SimulatedData sim;
  if (c.design == "section5") {
    sim = generate_section5(c.mcmc.seed, c.sim_n, c.sim_T, c.p, c.sv_on);
  } else if (c.design == "section61") {
    sim = generate_section61(c.mcmc.seed, c.sv_on);
    c.p = 4;
  } else {
    throw InputError("unknown design '" + c.design + "' (expected section5 or section61)");
  }
  fs::create_directories(f.out_dir);
  const fs::path dir(f.out_dir);
  std::vector<std::string> header{"date"};
  header.insert(header.end(), sim.data.names.begin(), sim.data.names.end());
  write_matrix_csv((dir / "data.csv").string(), header, sim.data.dates, sim.data.raw);
  write_code_map((dir / "codes.csv").string(), sim.data.names, sim.data.codes);
  nlohmann::json truth;
  truth["design"] = c.design;
  truth["seed"] = c.mcmc.seed;
  truth["p"] = sim.p;
  truth["sv"] = c.sv_on;
  truth["A"] = matrix_json(sim.truth.A);
  truth["B0"] = matrix_json(sim.truth.B0);
  truth["phi"] = std::vector<double>(sim.truth.phi.data(), sim.truth.phi.data() + sim.truth.phi.size());
  truth["omega2"] = std::vector<double>(sim.truth.omega2.data(), sim.truth.omega2.data() + sim.truth.omega2.size());
  write_text(dir / "truth.json", truth.dump(2) + "\n");
  const std::vector<std::string> est_dates(sim.data.dates.begin() + sim.p, sim.data.dates.end());
  std::vector<std::string> hhead{"date"};
  for (const auto& nm : sim.data.names) hhead.push_back("h_" + nm);
  write_matrix_csv((dir / "truth_h.csv").string(), hhead, est_dates, sim.h_truth.h);
  const auto path = reduced_form_cov_path(sim.truth.B0, sim.h_truth);
  const int n = sim.truth.n();
  Eigen::MatrixXd flat(static_cast<Eigen::Index>(path.size()), n * (n + 1) / 2);
  for (std::size_t t = 0; t < path.size(); ++t)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) flat(static_cast<Eigen::Index>(t), sigma_column(i, j, n)) = path[t](i, j);
  std::vector<std::string> shead{"date"};
  for (const auto& col : sigma_columns(sim.data.names)) shead.push_back(col);
  write_matrix_csv((dir / "truth_sigma.csv").string(), shead, est_dates, flat);
  write_text(dir / "simulate.ini", config_text(c));
  out << "wrote " << c.design << " data (n=" << n << ", T=" << sim.h_truth.h.rows() << ", p=" << sim.p << ") to "
      << f.out_dir << '\n';
  return 0;
}

int run_estimate(const SharedFlags& f, std::ostream& out) {
  RunConfig c = resolve(f);
  const Dataset raw = load_input(c);
  const PermutationMap P = resolve_ordering(c.ordering, raw.names);
  const Dataset data = raw.permuted(P);
  const ImpactStructure structure = parse_model(c.model);
  PriorSet priors = default_priors(data.transformed, c.p, data.level_flags, structure);
  apply_overrides(priors, c.priors);
  const EstimationData ed = make_estimation_data(data.transformed, c.p);
  SamplerOptions opts;
  opts.structure = structure;
  opts.an_backend = c.an_backend;
  opts.log_offset = c.log_offset;
  opts.sv_correction = c.sv_correction;
  const auto t0 = std::chrono::steady_clock::now();
  PosteriorSample post = run_mcmc(ed, priors, opts, c.mcmc);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  post.meta.ordering = P.indices();

  fs::create_directories(f.out_dir);
  const fs::path dir(f.out_dir);
  write_draws((dir / "draws.bin").string(), post);
  const PosteriorSummary s = summarize(post, raw.names);
  write_summary_json((dir / "summary.json").string(), s);
  write_b0_csv((dir / "b0.csv").string(), s);
  if (post.has_paths()) {
    const std::vector<std::string> dates(raw.transformed_dates.begin() + c.p, raw.transformed_dates.end());
    write_sigma_csv((dir / "sigma_path.csv").string(), s, dates);
  }
  write_text(dir / "run_config.ini", config_text(c));
  out << describe(s);
  out << "elapsed " << std::fixed << std::setprecision(1) << secs << " s; outputs in " << f.out_dir << '\n';
  return 0;
}

int run_forecast(const SharedFlags& f, const std::optional<std::string>& horizons,
                 const std::optional<std::string>& models, const std::optional<std::string>& benchmark,
                 const std::optional<int>& first_origin, const std::optional<int>& last_origin,
                 const std::optional<int>& step, const std::optional<int>& reest, const std::optional<int>& threads,
                 const std::optional<int>& paths, std::ostream& out) {
  RunConfig c = resolve(f);
  if (horizons) set_config_value(c, "forecast", "horizons", *horizons);
  if (models) set_config_value(c, "forecast", "models", *models);
  if (benchmark) c.benchmark = *benchmark;
  if (first_origin) c.first_origin = *first_origin;
  if (last_origin) c.last_origin = *last_origin;
  if (step) c.origin_step = *step;
  if (reest) c.reestimate_every = *reest;
  if (threads) c.threads = *threads;
  if (paths) c.paths_per_draw = *paths;
  const Dataset data = load_input(c);

  std::vector<ModelSpec> specs;
  for (const auto& m : c.models) {
    specs.push_back(parse_model_spec(m, c.p, data.names));
  }
  ForecastConfig fc;
  fc.horizons = c.horizons;
  const int Tall = static_cast<int>(data.transformed.rows());
  fc.first_origin = c.first_origin >= 0 ? c.first_origin : (2 * Tall) / 3;
  fc.last_origin = c.last_origin;
  fc.origin_step = c.origin_step;
  fc.paths_per_draw = c.paths_per_draw;
  fc.reestimate_every = c.reestimate_every;
  fc.threads = c.threads;
  fc.mcmc = c.mcmc;
  fc.priors = c.priors;
  fc.sampler.an_backend = c.an_backend;
  fc.sampler.log_offset = c.log_offset;
  fc.sampler.sv_correction = c.sv_correction;
  for (const auto& t : c.targets) fc.targets.push_back(data.index_of(t));
  fc.benchmark = specs.size();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (specs[i].name == c.benchmark) fc.benchmark = i;
  }
  if (fc.benchmark == specs.size()) throw InputError("benchmark '" + c.benchmark + "' is not among the models");

  const ForecastTable table = recursive_eval(data, specs, fc);
  fs::create_directories(f.out_dir);
  const fs::path dir(f.out_dir);
  table.write_csv((dir / "forecast_table.csv").string());
  table.write_json((dir / "forecast_table.json").string());
  table.write_records_csv((dir / "forecast_records.csv").string());
  write_text(dir / "run_config.ini", config_text(c));
  out << std::left << std::setw(10) << "model" << std::setw(16) << "variable" << std::setw(4) << "h" << std::right
      << std::setw(10) << "RMSFE" << std::setw(10) << "ALPL" << std::setw(9) << "DM p" << std::setw(9) << "DM-LS p"
      << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& r : table.rows) {
    out << std::left << std::setw(10) << r.model << std::setw(16) << r.variable << std::setw(4) << r.horizon
        << std::right << std::setw(10) << r.rmsfe << std::setw(10) << r.alpl << std::setw(9)
        << (r.dm_rmsfe.defined ? r.dm_rmsfe.p_value : std::nan("")) << std::setw(9)
        << (r.dm_alpl.defined ? r.dm_alpl.p_value : std::nan("")) << '\n';
  }
  for (const auto& line : table.log) out << "note: " << line << '\n';
  return 0;
}

int run_demo(int n, long reps, std::uint64_t seed, const std::string& out_dir, std::ostream& out) {
  Rng rng(seed, 2);
  const Eigen::VectorXd est = ordering_variance_demo(n, reps, rng);
  std::ostringstream csv;
  csv << "i,estimate,exact,relative_error\n";
  out << std::setw(4) << "i" << std::setw(14) << "E[u_i^2]" << std::setw(10) << "2^(i-1)" << std::setw(10)
      << "rel.err" << '\n';
  for (int i = 0; i < n; ++i) {
    const double exact = std::ldexp(1.0, i);
    const double rel = est[i] / exact - 1.0;
    out << std::setw(4) << i + 1 << std::setw(14) << std::fixed << std::setprecision(4) << est[i] << std::setw(10)
        << std::setprecision(0) << exact << std::setw(10) << std::setprecision(4) << rel << '\n';
    csv << i + 1 << ',' << std::setprecision(10) << est[i] << ',' << exact << ',' << rel << '\n';
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "ordering_variance.csv", csv.str());
  }
  return 0;
}

int run_summarize(const std::string& draws_path, const std::string& names, const std::string& csv_path,
                  std::ostream& out) {
  const PosteriorSample post = read_draws(draws_path);
  std::vector<std::string> labels;
  std::istringstream in(names);
  for (std::string tok; std::getline(in, tok, ',');) labels.push_back(tok);
  if (labels.empty()) {
    for (int i = 0; i < post.dims.n; ++i) labels.push_back("y" + std::to_string(i + 1));
  }
  out << describe(summarize(post, labels));
  if (!csv_path.empty()) write_draws_csv(csv_path, post);
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"oivar: VAR-SV estimation with unrestricted or lower-triangular impact matrices"};
  app.require_subcommand(1);
  SharedFlags f;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic data set");
  std::string design = "section5";
  std::optional<int> sim_n, sim_T;
  std::optional<std::string> sv;
  sim->add_option("--design", design, "section5 or section61")->check(CLI::IsMember({"section5", "section61"}));
  sim->add_option("--config", f.config, "run configuration file");
  sim->add_option("--seed", f.seed, "random seed");
  sim->add_option("--n", sim_n, "number of variables")->check(CLI::PositiveNumber);
  sim->add_option("--T", sim_T, "observations after the presample")->check(CLI::PositiveNumber);
  sim->add_option("--lags", f.lags, "lag order")->check(CLI::PositiveNumber);
  sim->add_option("--sv", sv, "stochastic volatility on or off")->check(CLI::IsMember({"on", "off"}));
  sim->add_option("--out-dir", f.out_dir, "output directory");

  auto* est = app.add_subcommand("estimate", "run the MCMC sampler");
  add_sampler_flags(est, f);
  est->add_option("--model", f.model, "oi or cs")->check(CLI::IsMember({"oi", "cs"}));
  est->add_option("--ordering", f.ordering, "as-given, reversed, a comma list or @file");
  est->add_flag("--no-paths", f.no_paths, "do not store log-volatility paths");

  auto* fce = app.add_subcommand("forecast-eval", "recursive out-of-sample evaluation");
  add_sampler_flags(fce, f);
  std::optional<std::string> horizons, models, benchmark;
  std::optional<int> first_origin, last_origin, step, reest, threads, paths;
  fce->add_option("--horizons", horizons, "comma list of horizons");
  fce->add_option("--models", models, "comma list of NAME=model:ordering");
  fce->add_option("--benchmark", benchmark, "benchmark model name");
  fce->add_option("--first-origin", first_origin, "observations used at the first origin");
  fce->add_option("--last-origin", last_origin, "observations used at the last origin");
  fce->add_option("--origin-step", step, "spacing of origins")->check(CLI::PositiveNumber);
  fce->add_option("--reestimate-every", reest, "origins between re-estimations")->check(CLI::PositiveNumber);
  fce->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  fce->add_option("--paths-per-draw", paths, "predictive paths per retained draw")->check(CLI::PositiveNumber);

  auto* demo = app.add_subcommand("demo-ordering", "variance inflation under Cholesky priors");
  int demo_n = 3;
  long reps = 1000000;
  std::uint64_t demo_seed = 1;
  std::string demo_out;
  demo->add_option("--n", demo_n, "number of variables")->check(CLI::PositiveNumber);
  demo->add_option("--reps", reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
  demo->add_option("--seed", demo_seed, "random seed");
  demo->add_option("--out-dir", demo_out, "also write ordering_variance.csv here");

  auto* summ = app.add_subcommand("summarize", "digest of a draws file");
  std::string draws_path, names, csv_path;
  summ->add_option("--draws", draws_path, "draws file")->required();
  summ->add_option("--names", names, "comma list of variable names");
  summ->add_option("--csv", csv_path, "export the draws as CSV");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    if (sim->parsed()) return run_simulate(f, design, sim_n, sim_T, sv, out);
    if (est->parsed()) return run_estimate(f, out);
    if (fce->parsed()) {
      return run_forecast(f, horizons, models, benchmark, first_origin, last_origin, step, reest, threads, paths, out);
    }
    if (demo->parsed()) return run_demo(demo_n, reps, demo_seed, demo_out, out);
    if (summ->parsed()) return run_summarize(draws_path, names, csv_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace oivar
