#include "oivar/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "oivar/errors.hpp"

namespace oivar {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower_trim(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out(s.substr(b, e - b));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string date_label(const std::vector<std::string>& dates, Eigen::Index i) {
  if (static_cast<std::size_t>(i) < dates.size()) return dates[static_cast<std::size_t>(i)];
  return "row " + std::to_string(i);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& cell, const std::string& where) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return kNaN;
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) throw InputError("non-numeric cell '" + cell + "' at " + where);
  return v;
}

}  // namespace

TransformCode parse_transform_code(std::string_view text) {
  const std::string t = lower_trim(text);
  if (t == "none" || t == "1" || t == "level" || t == "notransformation") return TransformCode::none;
  if (t == "log" || t == "4") return TransformCode::log;
  if (t == "diff" || t == "2" || t == "d" || t == "δ" || t == "Δ") return TransformCode::diff;
  if (t == "diff_log" || t == "5" || t == "dlog" || t == "δlog" || t == "Δlog") return TransformCode::diff_log;
  if (t == "diff2_log" || t == "6" || t == "d2log" || t == "δ2log" || t == "Δ²log" || t == "Δ2log")
    return TransformCode::diff2_log;
  throw InputError("unknown transformation code '" + std::string(text) + "'");
}

std::string to_string(TransformCode code) {
  switch (code) {
    case TransformCode::none: return "none";
    case TransformCode::log: return "log";
    case TransformCode::diff: return "diff";
    case TransformCode::diff_log: return "diff_log";
    case TransformCode::diff2_log: return "diff2_log";
  }
  return "none";
}

int differencing_order(TransformCode code) {
  switch (code) {
    case TransformCode::diff:
    case TransformCode::diff_log: return 1;
    case TransformCode::diff2_log: return 2;
    default: return 0;
  }
}

bool uses_log(TransformCode code) {
  return code == TransformCode::log || code == TransformCode::diff_log || code == TransformCode::diff2_log;
}

bool is_level(TransformCode code) { return code == TransformCode::none || code == TransformCode::log; }

Eigen::VectorXd apply_transform_aligned(const Eigen::VectorXd& series, TransformCode code,
                                        const std::vector<std::string>& dates) {
  const Eigen::Index len = series.size();
  Eigen::VectorXd x = series;
  if (uses_log(code)) {
    for (Eigen::Index i = 0; i < len; ++i) {
      if (std::isnan(x[i])) continue;
      if (!(x[i] > 0.0)) {
        throw InputError("non-positive value " + format_double(x[i]) + " at " + date_label(dates, i) +
                         " under a log transformation");
      }
      x[i] = std::log(x[i]);
    }
  }
  for (int d = 0; d < differencing_order(code); ++d) {
    Eigen::VectorXd y = Eigen::VectorXd::Constant(len, kNaN);
    for (Eigen::Index i = 1; i < len; ++i) y[i] = x[i] - x[i - 1];  // NaN propagates
    x = y;
    for (Eigen::Index i = 0; i <= d && i < len; ++i) x[i] = kNaN;
  }
  return x;
}

std::vector<double> apply_transform(const std::vector<double>& series, TransformCode code,
                                    const std::vector<std::string>& dates) {
  const Eigen::VectorXd in = Eigen::Map<const Eigen::VectorXd>(series.data(), static_cast<Eigen::Index>(series.size()));
  const Eigen::VectorXd out = apply_transform_aligned(in, code, dates);
  const std::size_t skip = static_cast<std::size_t>(std::min<Eigen::Index>(differencing_order(code), out.size()));
  return std::vector<double>(out.data() + skip, out.data() + out.size());
}

CodeMap fred_md_code_map() {
  using C = TransformCode;
  return {{"RPI", C::diff_log},           {"DPCERA3M086SBEA", C::diff_log}, {"CMRMTSPLx", C::diff_log},
          {"INDPRO", C::diff_log},        {"CUMFNS", C::diff},              {"UNRATE", C::diff},
          {"PAYEMS", C::diff_log},        {"CES0600000007", C::none},       {"CES0600000008", C::diff_log},
          {"WPSFD49207", C::diff2_log},   {"PPICMM", C::diff2_log},         {"PCEPI", C::diff2_log},
          {"FEDFUNDS", C::none},          {"HOUST", C::log},                {"S&P 500", C::diff_log},
          {"EXUSUKx", C::diff_log},       {"T1YFFM", C::none},              {"T10YFFM", C::none},
          {"BAAFFM", C::none},            {"NAPMNOI", C::none}};
}

std::vector<std::string> fred_md_variables() {
  // Core variables first; the remainder in table order. Users who want a
  // different convention for the other 16 pass an explicit ordering.
  return {"INDPRO", "UNRATE",  "PCEPI",         "FEDFUNDS",      "RPI",        "DPCERA3M086SBEA", "CMRMTSPLx",
          "CUMFNS", "PAYEMS",  "CES0600000007", "CES0600000008", "WPSFD49207", "PPICMM",          "HOUST",
          "S&P 500", "EXUSUKx", "T1YFFM",       "T10YFFM",       "BAAFFM",     "NAPMNOI"};
}

CodeMap read_code_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open code map " + path);
  CodeMap out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2) throw InputError(path + ":" + std::to_string(lineno) + ": expected 'mnemonic,code'");
    if (lineno == 1 && lower_trim(cells[0]) == "mnemonic") continue;
    out[cells[0]] = parse_transform_code(cells[1]);
  }
  return out;
}

void write_code_map(const std::string& path, const std::vector<std::string>& names,
                    const std::vector<TransformCode>& codes) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << "mnemonic,code\n";
  for (std::size_t i = 0; i < names.size(); ++i) out << names[i] << ',' << to_string(codes[i]) << '\n';
}

Dataset make_dataset(std::vector<std::string> names, std::vector<std::string> dates, Eigen::MatrixXd raw,
                     std::vector<TransformCode> codes) {
  const Eigen::Index n = raw.cols();
  if (static_cast<Eigen::Index>(names.size()) != n || static_cast<Eigen::Index>(codes.size()) != n ||
      static_cast<Eigen::Index>(dates.size()) != raw.rows()) {
    throw InputError("dataset: names, codes and dates must match the raw matrix");
  }
  Dataset d;
  Eigen::MatrixXd aligned(raw.rows(), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (raw.col(j).array().isNaN().all()) throw InputError("column '" + names[static_cast<std::size_t>(j)] + "' is entirely missing");
    try {
      aligned.col(j) = apply_transform_aligned(raw.col(j), codes[static_cast<std::size_t>(j)], dates);
    } catch (const InputError& e) {
      throw InputError("series '" + names[static_cast<std::size_t>(j)] + "': " + e.what());
    }
  }
  Eigen::Index first = 0;
  while (first < aligned.rows() && !aligned.row(first).allFinite()) ++first;
  for (Eigen::Index t = first; t < aligned.rows(); ++t) {
    if (!aligned.row(t).allFinite()) {
      throw InputError("missing or undefined value inside the sample at " + date_label(dates, t));
    }
  }
  d.transformed = aligned.bottomRows(aligned.rows() - first);
  d.transformed_dates.assign(dates.begin() + first, dates.end());
  d.first_row = static_cast<int>(first);
  d.level_flags.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) d.level_flags[static_cast<std::size_t>(j)] = is_level(codes[static_cast<std::size_t>(j)]);
  d.names = std::move(names);
  d.dates = std::move(dates);
  d.raw = std::move(raw);
  d.codes = std::move(codes);
  return d;
}

Dataset load_csv(const std::string& path, const CodeMap& codes) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open data file " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw InputError(path + ": need a date column and at least one series");
  std::vector<std::string> names(header.begin() + 1, header.end());
  for (const auto& [name, code] : codes) {
    (void)code;
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw InputError("code map names '" + name + "', which is not a column of " + path);
    }
  }
  std::vector<std::string> dates;
  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(cells.size()));
    }
    dates.push_back(cells[0]);
    std::vector<double> row(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      row[j] = parse_double(cells[j + 1], path + ":" + std::to_string(lineno));
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t j = 0; j < names.size(); ++j) raw(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = rows[t][j];
  std::vector<TransformCode> tc(names.size(), TransformCode::none);
  for (std::size_t j = 0; j < names.size(); ++j) {
    auto it = codes.find(names[j]);
    if (it != codes.end()) tc[j] = it->second;
  }
  return make_dataset(std::move(names), std::move(dates), std::move(raw), std::move(tc));
}

Dataset Dataset::permuted(const PermutationMap& P) const {
  if (P.size() != n()) throw InputError("dataset permutation has the wrong size");
  Dataset d = *this;
  d.raw = P.permute_columns(raw);
  d.transformed = P.permute_columns(transformed);
  for (int i = 0; i < n(); ++i) {
    d.names[static_cast<std::size_t>(i)] = names[static_cast<std::size_t>(P[i])];
    d.codes[static_cast<std::size_t>(i)] = codes[static_cast<std::size_t>(P[i])];
    d.level_flags[static_cast<std::size_t>(i)] = level_flags[static_cast<std::size_t>(P[i])];
  }
  return d;
}

Dataset Dataset::truncated(int rows) const {
  if (rows < 0 || rows > transformed.rows()) throw InputError("truncated: row count out of range");
  Dataset d = *this;
  d.transformed = transformed.topRows(rows);
  d.transformed_dates.resize(static_cast<std::size_t>(rows));
  const int raw_rows = first_row + rows;
  d.raw = raw.topRows(raw_rows);
  d.dates.resize(static_cast<std::size_t>(raw_rows));
  return d;
}

int Dataset::index_of(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("unknown variable '" + name + "'");
  return static_cast<int>(it - names.begin());
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::string>& row_labels, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    out << (static_cast<std::size_t>(t) < row_labels.size() ? row_labels[static_cast<std::size_t>(t)] : std::to_string(t));
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << ',' << format_double(m(t, j));
    out << '\n';
  }
}

void write_transformed_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header{"date"};
  header.insert(header.end(), data.names.begin(), data.names.end());
  write_matrix_csv(path, header, data.transformed_dates, data.transformed);
}

}  // namespace oivar
