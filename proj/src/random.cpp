#include "oivar/random.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

Rng::Engine seeded_engine(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> parts;
  for (auto w : words) {
    parts.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    parts.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(parts.begin(), parts.end());
  return Rng::Engine(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seeded_engine({seed})) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(seeded_engine({seed, stream, 0x9e3779b97f4a7c15ull})) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : engine_(seeded_engine({seed, stream, substream, 0x9e3779b97f4a7c15ull})) {}

double Rng::uniform() {
  double u;
  do {
    u = std::generate_canonical<double, 53>(engine_);
  } while (u <= 0.0);
  return u;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  // Box-Muller without caching so the stream position depends only on the
  // number of calls.
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal(double mean, double sd) { return mean + sd * normal(); }

double Rng::gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw InputError("gamma draw requires positive shape and scale");
  }
  std::gamma_distribution<double> dist(shape, scale);
  return dist(engine_);
}

double Rng::inverse_gamma(double shape, double scale) {
  if (!(scale > 0.0)) {
    throw InputError("inverse-gamma draw requires a positive scale");
  }
  return scale / gamma(shape, 1.0);
}

double Rng::truncated_normal(double mean, double sd, double lo, double hi) {
  if (!(sd > 0.0) || !(lo < hi)) {
    throw InputError("truncated normal requires sd > 0 and lo < hi");
  }
  const double a = (lo - mean) / sd;
  const double b = (hi - mean) / sd;
  static const boost::math::normal_distribution<double> std_normal;
  const double pa = boost::math::cdf(std_normal, a);
  const double pb = boost::math::cdf(std_normal, b);
  if (pb - pa > 0.25) {
    for (;;) {
      const double z = normal();
      if (z > a && z < b) {
        return mean + sd * z;
      }
    }
  }
  // Inverse CDF, working in the tail with the smaller probabilities.
  double z;
  if (a > 0.0) {
    const double qa = boost::math::cdf(boost::math::complement(std_normal, a));
    const double qb = boost::math::cdf(boost::math::complement(std_normal, b));
    const double q = qb + uniform() * (qa - qb);
    z = boost::math::quantile(boost::math::complement(std_normal, q));
  } else {
    const double p = pa + uniform() * (pb - pa);
    z = boost::math::quantile(std_normal, p);
  }
  z = std::min(std::max(z, a), b);
  double x = mean + sd * z;
  if (!(x > lo)) x = std::nextafter(lo, hi);
  if (!(x < hi)) x = std::nextafter(hi, lo);
  return x;
}

double Rng::half_cauchy() {
  return std::tan(0.5 * std::numbers::pi * uniform());
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index size) {
  Eigen::VectorXd out(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    out[i] = normal();
  }
  return out;
}

std::string Rng::serialize() const {
  std::ostringstream os;
  os << engine_;
  return os.str();
}

void Rng::deserialize(const std::string& state) {
  std::istringstream is(state);
  is >> engine_;
  if (!is) {
    throw InputError("could not restore generator state");
  }
}

}  // namespace oivar
