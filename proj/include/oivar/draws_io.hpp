#pragma once

#include <string>

#include "oivar/posterior.hpp"

namespace oivar {

// Little-endian binary layout, all integers fixed width:
//   char[8]  magic "OIVSDRW1"
//   u32      n, p, T
//   u64      number of draws
//   u8       structure (0 unrestricted, 1 unit lower triangular)
//   u8       1 if full log-volatility paths follow each draw
//   u16      reserved (0)
//   u64      seed
//   i32      burn, thin, chains
//   i32[n]   ordering
//   u64      number of sweep timings, then that many f64 seconds
// then per draw, f64 throughout, matrices row-major:
//   A (k x n), B0 (n x n), phi (n), omega2 (n), h_last (n),
//   psi (k x n), z_psi (k x n), kappa1, kappa2, z_k1, z_k2,
//   h (T x n) when paths are stored.
void write_draws(const std::string& path, const PosteriorSample& sample);
PosteriorSample read_draws(const std::string& path);

// One row per draw: A, B0, phi, omega2, kappa1, kappa2, h_last.
void write_draws_csv(const std::string& path, const PosteriorSample& sample);

}  // namespace oivar
