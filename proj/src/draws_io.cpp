#include "oivar/draws_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

constexpr char kMagic[8] = {'O', 'I', 'V', 'S', 'D', 'R', 'W', '1'};

template <typename T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  in.read(buf, sizeof(T));
  if (!in) throw InputError("draws file is truncated");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get<double>(in);
  return m;
}

}  // namespace

void write_draws(const std::string& path, const PosteriorSample& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  const int n = s.dims.n;
  const int k = s.dims.k();
  const bool paths = s.has_paths();
  out.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.dims.p));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(s.dims.T));
  put<std::uint64_t>(out, s.draws.size());
  put<std::uint8_t>(out, static_cast<std::uint8_t>(s.meta.structure));
  put<std::uint8_t>(out, paths ? 1 : 0);
  put<std::uint16_t>(out, 0);
  put<std::uint64_t>(out, s.meta.seed);
  put<std::int32_t>(out, s.meta.burn);
  put<std::int32_t>(out, s.meta.thin);
  put<std::int32_t>(out, s.meta.chains);
  for (int i = 0; i < n; ++i) {
    put<std::int32_t>(out, s.meta.ordering.empty() ? i : s.meta.ordering[static_cast<std::size_t>(i)]);
  }
  put<std::uint64_t>(out, s.meta.sweep_seconds.size());
  for (double v : s.meta.sweep_seconds) put<double>(out, v);
  for (const Draw& d : s.draws) {
    if (d.params.A.rows() != k || d.params.n() != n) throw InputError("write_draws: draw dimensions differ from header");
    put_matrix(out, d.params.A);
    put_matrix(out, d.params.B0);
    put_matrix(out, d.params.phi);
    put_matrix(out, d.params.omega2);
    put_matrix(out, d.h_last.transpose());
    put_matrix(out, d.hs.psi);
    put_matrix(out, d.hs.z_psi);
    put<double>(out, d.hs.kappa1);
    put<double>(out, d.hs.kappa2);
    put<double>(out, d.hs.z_k1);
    put<double>(out, d.hs.z_k2);
    if (paths) {
      if (d.h.h.rows() != s.dims.T) throw InputError("write_draws: log-volatility path has the wrong length");
      put_matrix(out, d.h.h);
    }
  }
  if (!out) throw InputError("error writing " + path);
}

PosteriorSample read_draws(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw InputError(path + " is not a draws file");
  PosteriorSample s;
  s.dims.n = static_cast<int>(get<std::uint32_t>(in));
  s.dims.p = static_cast<int>(get<std::uint32_t>(in));
  s.dims.T = static_cast<int>(get<std::uint32_t>(in));
  const auto count = get<std::uint64_t>(in);
  const auto structure = get<std::uint8_t>(in);
  if (structure > 1) throw InputError(path + ": unknown impact structure");
  s.meta.structure = static_cast<ImpactStructure>(structure);
  const bool paths = get<std::uint8_t>(in) != 0;
  (void)get<std::uint16_t>(in);
  s.meta.seed = get<std::uint64_t>(in);
  s.meta.burn = get<std::int32_t>(in);
  s.meta.thin = get<std::int32_t>(in);
  s.meta.chains = get<std::int32_t>(in);
  const int n = s.dims.n;
  const int k = s.dims.k();
  s.meta.ordering.resize(static_cast<std::size_t>(n));
  for (auto& v : s.meta.ordering) v = get<std::int32_t>(in);
  const auto nsweeps = get<std::uint64_t>(in);
  s.meta.sweep_seconds.resize(nsweeps);
  for (auto& v : s.meta.sweep_seconds) v = get<double>(in);
  s.draws.resize(count);
  for (Draw& d : s.draws) {
    d.params.A = get_matrix(in, k, n);
    d.params.B0 = get_matrix(in, n, n);
    d.params.phi = get_matrix(in, n, 1);
    d.params.omega2 = get_matrix(in, n, 1);
    d.h_last = get_matrix(in, 1, n);
    d.hs.psi = get_matrix(in, k, n);
    d.hs.z_psi = get_matrix(in, k, n);
    d.hs.kappa1 = get<double>(in);
    d.hs.kappa2 = get<double>(in);
    d.hs.z_k1 = get<double>(in);
    d.hs.z_k2 = get<double>(in);
    if (paths) d.h.h = get_matrix(in, s.dims.T, n);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw InputError(path + ": trailing bytes after the last draw");
  return s;
}

void write_draws_csv(const std::string& path, const PosteriorSample& s) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  const int n = s.dims.n;
  const int k = s.dims.k();
  out << "draw";
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < n; ++c) out << ",A_" << r << '_' << c;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out << ",B0_" << r << '_' << c;
  for (int i = 0; i < n; ++i) out << ",phi_" << i;
  for (int i = 0; i < n; ++i) out << ",omega2_" << i;
  out << ",kappa1,kappa2";
  for (int i = 0; i < n; ++i) out << ",h_last_" << i;
  out << '\n';
  out.precision(17);
  for (std::size_t d = 0; d < s.draws.size(); ++d) {
    const Draw& dr = s.draws[d];
    out << d;
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < n; ++c) out << ',' << dr.params.A(r, c);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out << ',' << dr.params.B0(r, c);
    for (int i = 0; i < n; ++i) out << ',' << dr.params.phi[i];
    for (int i = 0; i < n; ++i) out << ',' << dr.params.omega2[i];
    out << ',' << dr.hs.kappa1 << ',' << dr.hs.kappa2;
    for (int i = 0; i < n; ++i) out << ',' << dr.h_last[i];
    out << '\n';
  }
}

}  // namespace oivar
