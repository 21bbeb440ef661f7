#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace oivar {

// Pseudo-random stream for one chain. Wraps a 64-bit Mersenne twister and
// provides the variates the samplers need. Streams derived from the same
// (seed, stream) pair are identical.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed = 0);
  Rng(std::uint64_t seed, std::uint64_t stream);
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream);

  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double sd);
  double gamma(double shape, double scale = 1.0);
  // Density proportional to x^{-shape-1} exp(-scale / x).
  double inverse_gamma(double shape, double scale);
  double truncated_normal(double mean, double sd, double lo, double hi);
  double half_cauchy();
  Eigen::VectorXd normal_vector(Eigen::Index size);

  Engine& engine() { return engine_; }

  std::string serialize() const;
  void deserialize(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  Engine engine_;
};

}  // namespace oivar
