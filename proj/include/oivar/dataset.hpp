#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "oivar/model_core.hpp"

namespace oivar {

enum class TransformCode { none, log, diff, diff_log, diff2_log };

// Accepts the names above, FRED-MD numeric codes (1, 2, 4, 5, 6) and the
// usual table spellings ("dlog", "d2log", "no transformation", ...).
TransformCode parse_transform_code(std::string_view text);
std::string to_string(TransformCode code);
int differencing_order(TransformCode code);
bool uses_log(TransformCode code);
// Variables in levels (none, log) get a unit prior mean on their first own lag.
bool is_level(TransformCode code);

// Transformed series without the leading undefined values:
// diff_log on (100, 110) -> (ln 1.1). Dates, when given, name the offending
// observation in error messages.
std::vector<double> apply_transform(const std::vector<double>& series, TransformCode code,
                                    const std::vector<std::string>& dates = {});

// Same length as the input; undefined or missing entries are NaN.
Eigen::VectorXd apply_transform_aligned(const Eigen::VectorXd& series, TransformCode code,
                                        const std::vector<std::string>& dates = {});

using CodeMap = std::map<std::string, TransformCode>;

// The 20-variable monthly FRED-MD list with its transformations.
CodeMap fred_md_code_map();
// Variable order with the four core series first.
std::vector<std::string> fred_md_variables();

CodeMap read_code_map(const std::string& path);
void write_code_map(const std::string& path, const std::vector<std::string>& names,
                    const std::vector<TransformCode>& codes);

struct Dataset {
  std::vector<std::string> names;
  std::vector<std::string> dates;  // raw rows
  Eigen::MatrixXd raw;             // T' x n, NaN where missing
  std::vector<TransformCode> codes;
  Eigen::MatrixXd transformed;     // rows kept after trimming, all finite
  std::vector<std::string> transformed_dates;
  std::vector<bool> level_flags;
  int first_row = 0;  // raw row of transformed.row(0)

  int n() const { return static_cast<int>(names.size()); }
  Dataset permuted(const PermutationMap& P) const;
  // Keeps the first `rows` transformed observations.
  Dataset truncated(int rows) const;
  int index_of(const std::string& name) const;
};

// Applies the codes, trims rows with any undefined value from the top and
// rejects interior gaps.
Dataset make_dataset(std::vector<std::string> names, std::vector<std::string> dates, Eigen::MatrixXd raw,
                     std::vector<TransformCode> codes);

// Header row of mnemonics, first column of date labels, empty cells missing.
// Columns not named in the code map are used untransformed; names in the
// map that are absent from the file are an error.
Dataset load_csv(const std::string& path, const CodeMap& codes = {});

void write_matrix_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::string>& row_labels, const Eigen::MatrixXd& m);
void write_transformed_csv(const std::string& path, const Dataset& data);

}  // namespace oivar
