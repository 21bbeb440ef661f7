#include "oivar/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oivar {

double mean_of(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

double batch_means_se(std::span<const double> x, int batches) {
  const std::size_t n = x.size();
  if (n < 4) return std::sqrt(variance_of(x) / std::max<double>(1.0, static_cast<double>(n)));
  const std::size_t b = std::clamp<std::size_t>(static_cast<std::size_t>(batches), 2, n / 2);
  const std::size_t len = n / b;
  std::vector<double> means(b);
  for (std::size_t j = 0; j < b; ++j) means[j] = mean_of(x.subspan(j * len, len));
  // Var of the overall mean ~ Var(batch mean) / b.
  return std::sqrt(variance_of(means) / static_cast<double>(b));
}

}  // namespace oivar
