#include "oivar/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

std::string strip(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = strip(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const char* b = value.data();
  const char* e = b + value.size();
  auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) throw InputError("config: bad value '" + value + "' for " + key);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw InputError("config: bad boolean '" + value + "' for " + key);
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream out;
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << v[i];
  return out.str();
}

std::string opt(const std::optional<double>& v) {
  if (!v) return "default";
  std::ostringstream out;
  out.precision(17);
  out << *v;
  return out.str();
}

}  // namespace

ImpactStructure parse_model(const std::string& s) {
  if (s == "oi") return ImpactStructure::unrestricted;
  if (s == "cs") return ImpactStructure::unit_lower_triangular;
  throw InputError("unknown model '" + s + "' (expected oi or cs)");
}

AnBackend parse_an_backend(const std::string& s) {
  if (s == "mh" || s == "metropolis") return AnBackend::metropolis;
  if (s == "approx" || s == "approximate") return AnBackend::approximate;
  throw InputError("unknown AN backend '" + s + "' (expected mh or approx)");
}

std::string to_string(AnBackend b) { return b == AnBackend::metropolis ? "mh" : "approx"; }

void set_config_value(RunConfig& c, const std::string& section, const std::string& key, const std::string& raw) {
  const std::string v = strip(raw);
  const std::string where = section + "." + key;
  auto prior = [&](std::optional<double>& slot) {
    slot = (v == "default") ? std::nullopt : std::optional<double>(parse_number<double>(where, v));
  };
  if (section == "model") {
    if (key == "model") {
      (void)parse_model(v);
      c.model = v;
    } else if (key == "ordering") {
      c.ordering = v;
    } else if (key == "p" || key == "lags") {
      c.p = parse_number<int>(where, v);
      if (c.p < 1) throw InputError("config: p must be at least 1");
    } else {
      throw InputError("config: unknown key " + where);
    }
  } else if (section == "sampler") {
    if (key == "burn") c.mcmc.burn = parse_number<int>(where, v);
    else if (key == "draws") c.mcmc.draws = parse_number<int>(where, v);
    else if (key == "thin") c.mcmc.thin = parse_number<int>(where, v);
    else if (key == "seed") c.mcmc.seed = parse_number<std::uint64_t>(where, v);
    else if (key == "chains") c.mcmc.chains = parse_number<int>(where, v);
    else if (key == "keep_paths") c.mcmc.keep_paths = parse_bool(where, v);
    else if (key == "an_backend") c.an_backend = parse_an_backend(v);
    else if (key == "log_offset") c.log_offset = parse_number<double>(where, v);
    else if (key == "sv_correction") c.sv_correction = parse_bool(where, v);
    else throw InputError("config: unknown key " + where);
    if (c.mcmc.burn < 0 || c.mcmc.draws < 1 || c.mcmc.thin < 1 || c.mcmc.chains < 1) {
      throw InputError("config: sampler counts out of range at " + where);
    }
  } else if (section == "prior") {
    if (key == "intercept_var") prior(c.priors.intercept_var);
    else if (key == "b0_var") prior(c.priors.b0_var);
    else if (key == "phi0") prior(c.priors.phi0);
    else if (key == "vphi") prior(c.priors.vphi);
    else if (key == "nu") prior(c.priors.nu);
    else if (key == "omega2_mean") prior(c.priors.omega2_mean);
    else throw InputError("config: unknown key " + where);
  } else if (section == "data") {
    if (key == "path") c.data_path = v;
    else if (key == "codes") c.codes_path = v;
    else throw InputError("config: unknown key " + where);
  } else if (section == "forecast") {
    if (key == "horizons") {
      c.horizons.clear();
      for (const auto& h : split(v, ',')) c.horizons.push_back(parse_number<int>(where, h));
    } else if (key == "models") {
      c.models = split(v, ',');
    } else if (key == "benchmark") {
      c.benchmark = v;
    } else if (key == "first_origin") {
      c.first_origin = parse_number<int>(where, v);
    } else if (key == "last_origin") {
      c.last_origin = parse_number<int>(where, v);
    } else if (key == "origin_step") {
      c.origin_step = parse_number<int>(where, v);
    } else if (key == "paths_per_draw") {
      c.paths_per_draw = parse_number<int>(where, v);
    } else if (key == "reestimate_every") {
      c.reestimate_every = parse_number<int>(where, v);
    } else if (key == "threads") {
      c.threads = parse_number<int>(where, v);
    } else if (key == "targets") {
      c.targets = split(v, ',');
    } else {
      throw InputError("config: unknown key " + where);
    }
  } else if (section == "simulate") {
    if (key == "design") c.design = v;
    else if (key == "n") c.sim_n = parse_number<int>(where, v);
    else if (key == "T") c.sim_T = parse_number<int>(where, v);
    else if (key == "sv") c.sv_on = parse_bool(where, v);
    else throw InputError("config: unknown key " + where);
  } else {
    throw InputError("config: unknown section [" + section + "]");
  }
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(path + ":" + std::to_string(lineno) + ": bad section header");
      section = strip(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(path + ":" + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw InputError(path + ":" + std::to_string(lineno) + ": key outside a section");
    try {
      set_config_value(base, section, strip(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

std::string config_text(const RunConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "[model]\nmodel = " << c.model << "\nordering = " << c.ordering << "\np = " << c.p << "\n\n";
  o << "[sampler]\nburn = " << c.mcmc.burn << "\ndraws = " << c.mcmc.draws << "\nthin = " << c.mcmc.thin
    << "\nseed = " << c.mcmc.seed << "\nchains = " << c.mcmc.chains
    << "\nkeep_paths = " << (c.mcmc.keep_paths ? "true" : "false") << "\nan_backend = " << to_string(c.an_backend)
    << "\nlog_offset = " << c.log_offset
    << "\nsv_correction = " << (c.sv_correction ? "true" : "false") << "\n\n";
  o << "[prior]\nintercept_var = " << opt(c.priors.intercept_var) << "\nb0_var = " << opt(c.priors.b0_var)
    << "\nphi0 = " << opt(c.priors.phi0) << "\nvphi = " << opt(c.priors.vphi) << "\nnu = " << opt(c.priors.nu)
    << "\nomega2_mean = " << opt(c.priors.omega2_mean) << "\n\n";
  o << "[data]\npath = " << c.data_path << "\ncodes = " << c.codes_path << "\n\n";
  o << "[forecast]\nhorizons = " << join(c.horizons) << "\nmodels = " << join(c.models)
    << "\nbenchmark = " << c.benchmark << "\nfirst_origin = " << c.first_origin
    << "\nlast_origin = " << c.last_origin << "\norigin_step = " << c.origin_step
    << "\npaths_per_draw = " << c.paths_per_draw << "\nreestimate_every = " << c.reestimate_every
    << "\nthreads = " << c.threads << "\ntargets = " << join(c.targets) << "\n\n";
  o << "[simulate]\ndesign = " << c.design << "\nn = " << c.sim_n << "\nT = " << c.sim_T
    << "\nsv = " << (c.sv_on ? "true" : "false") << "\n";
  return o.str();
}

PermutationMap resolve_ordering(const std::string& directive, const std::vector<std::string>& names) {
  const int n = static_cast<int>(names.size());
  if (directive.empty() || directive == "as-given") return PermutationMap::identity(n);
  if (directive == "reversed") return PermutationMap::reversed(n);
  std::string list = directive;
  if (directive.front() == '@') {
    std::ifstream in(directive.substr(1));
    if (!in) throw InputError("cannot open ordering file " + directive.substr(1));
    std::ostringstream all;
    std::string line;
    while (std::getline(in, line)) all << line << ',';
    list = all.str();
  }
  std::vector<int> perm;
  for (const auto& tok : split(list, ',')) {
    auto it = std::find(names.begin(), names.end(), tok);
    if (it != names.end()) {
      perm.push_back(static_cast<int>(it - names.begin()));
    } else {
      int idx = -1;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), idx);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || idx < 0 || idx >= n) {
        throw InputError("ordering names unknown variable '" + tok + "'");
      }
      perm.push_back(idx);
    }
  }
  if (static_cast<int>(perm.size()) != n) {
    throw InputError("ordering lists " + std::to_string(perm.size()) + " variables, data has " + std::to_string(n));
  }
  return PermutationMap(std::move(perm));
}

}  // namespace oivar
