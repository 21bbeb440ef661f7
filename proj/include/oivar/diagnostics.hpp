#pragma once

#include <span>
#include <vector>

namespace oivar {

double mean_of(std::span<const double> x);
double variance_of(std::span<const double> x);

// Monte Carlo standard error of the mean of a correlated chain by
// non-overlapping batch means.
double batch_means_se(std::span<const double> x, int batches = 40);

}  // namespace oivar
