#pragma once

#include <string>
#include <vector>

#include "oivar/absolute_normal.hpp"
#include "oivar/model_core.hpp"
#include "oivar/priors.hpp"
#include "oivar/sampler.hpp"

namespace oivar {

// Settings shared by the CLI subcommands. Files use
//   [section]
//   key = value
// with '#' comments. Sections: model, sampler, prior, data, forecast, simulate.
struct RunConfig {
  // [model]
  std::string model = "oi";  // oi | cs
  std::string ordering = "as-given";  // as-given | reversed | comma list | @file
  int p = 4;
  // [sampler]
  McmcConfig mcmc;
  AnBackend an_backend = AnBackend::metropolis;
  double log_offset = 1e-4;
  bool sv_correction = true;
  // [prior]
  PriorOverrides priors;
  // [data]
  std::string data_path;
  std::string codes_path;
  // [forecast]
  std::vector<int> horizons{1, 6, 12};
  std::vector<std::string> models{"CS-1=cs:as-given", "CS-2=cs:reversed", "OI-1=oi:as-given", "OI-2=oi:reversed"};
  std::string benchmark = "CS-1";
  int first_origin = -1;  // -1: two thirds of the sample
  int last_origin = -1;
  int origin_step = 1;
  int paths_per_draw = 1;
  int reestimate_every = 1;
  int threads = 1;
  std::vector<std::string> targets;
  // [simulate]
  std::string design = "section5";  // section5 | section61
  int sim_n = 3;
  int sim_T = 500;
  bool sv_on = true;
};

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key, const std::string& value);
RunConfig load_config(const std::string& path, RunConfig base = {});
// Every setting, section by section, in the file syntax read by load_config.
std::string config_text(const RunConfig& cfg);

ImpactStructure parse_model(const std::string& s);
AnBackend parse_an_backend(const std::string& s);
std::string to_string(AnBackend b);

// "as-given", "reversed", a comma list of variable names or 0-based indices
// (position i names the variable estimated i-th), or "@path" to a file with
// that list.
PermutationMap resolve_ordering(const std::string& directive, const std::vector<std::string>& names);

}  // namespace oivar
