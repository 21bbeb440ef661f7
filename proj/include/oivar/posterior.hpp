#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "oivar/model_core.hpp"
#include "oivar/priors.hpp"

namespace oivar {

enum class ImpactStructure : std::uint8_t {
  unrestricted = 0,          // order-invariant model
  unit_lower_triangular = 1  // Cholesky baseline
};

struct Draw {
  VarSvParams params;
  LogVolPath h;  // full path, or empty when paths are not kept
  Eigen::RowVectorXd h_last;
  HorseshoeState hs;
};

struct SampleMeta {
  std::uint64_t seed = 0;
  int burn = 0;
  int thin = 1;
  int chains = 1;
  ImpactStructure structure = ImpactStructure::unrestricted;
  std::vector<int> ordering;  // permutation applied to the data before estimation
  std::vector<double> sweep_seconds;
};

struct PosteriorSample {
  ModelDims dims;
  std::vector<Draw> draws;
  SampleMeta meta;

  bool empty() const { return draws.empty(); }
  std::size_t size() const { return draws.size(); }
  bool has_paths() const { return !draws.empty() && draws.front().h.h.rows() > 0; }
};

}  // namespace oivar
