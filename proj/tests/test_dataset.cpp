#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "doctest.h"
#include "oivar/dataset.hpp"
#include "oivar/errors.hpp"

using namespace oivar;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::temp_directory_path() / ("oivar_ds_" + std::to_string(::getpid()))) {
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name, const std::string& body) const {
    const auto p = path / name;
    std::ofstream(p) << body;
    return p.string();
  }
};

}  // namespace

TEST_CASE("transform definitions") {
  const auto dl = apply_transform({100.0, 110.0}, TransformCode::diff_log);
  REQUIRE(dl.size() == 1);
  CHECK(dl[0] == doctest::Approx(std::log(1.1)).epsilon(1e-15));

  const auto flat = apply_transform({5.0, 5.0, 5.0, 5.0}, TransformCode::diff2_log);
  REQUIRE(flat.size() == 2);
  CHECK(flat[0] == 0.0);
  CHECK(flat[1] == 0.0);

  const double e = std::exp(1.0);
  const auto d2 = apply_transform({1.0, e, e * e * e}, TransformCode::diff2_log);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0] == doctest::Approx(1.0).epsilon(1e-14));

  CHECK(apply_transform({1.0, -2.0}, TransformCode::none) == std::vector<double>{1.0, -2.0});
  CHECK(apply_transform({1.0, 4.0, 2.0}, TransformCode::diff) == std::vector<double>{3.0, -2.0});
  CHECK(apply_transform({e}, TransformCode::log)[0] == doctest::Approx(1.0));
}

TEST_CASE("log transforms reject non-positive values and name the date") {
  try {
    apply_transform({1.0, 0.0, 2.0}, TransformCode::diff_log, {"1960:01", "1960:02", "1960:03"});
    FAIL("expected an InputError");
  } catch (const InputError& err) {
    CHECK(std::string(err.what()).find("1960:02") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_transform({-1.0}, TransformCode::log), InputError);
  CHECK_NOTHROW(apply_transform({-1.0, 0.0}, TransformCode::diff));
}

TEST_CASE("transform code spellings") {
  CHECK(parse_transform_code("diff_log") == TransformCode::diff_log);
  CHECK(parse_transform_code("5") == TransformCode::diff_log);
  CHECK(parse_transform_code("6") == TransformCode::diff2_log);
  CHECK(parse_transform_code("1") == TransformCode::none);
  CHECK(parse_transform_code("2") == TransformCode::diff);
  CHECK(parse_transform_code("4") == TransformCode::log);
  CHECK(parse_transform_code("no transformation") == TransformCode::none);
  CHECK(parse_transform_code(" DLOG ") == TransformCode::diff_log);
  CHECK_THROWS_AS(parse_transform_code("3"), InputError);
  for (auto c : {TransformCode::none, TransformCode::log, TransformCode::diff, TransformCode::diff_log,
                 TransformCode::diff2_log}) {
    CHECK(parse_transform_code(to_string(c)) == c);
  }
  CHECK(differencing_order(TransformCode::diff2_log) == 2);
  CHECK(differencing_order(TransformCode::log) == 0);
  CHECK(is_level(TransformCode::log));
  CHECK_FALSE(is_level(TransformCode::diff));
}

TEST_CASE("monthly 20-variable code map") {
  using C = TransformCode;
  const std::vector<std::pair<std::string, C>> table{
      {"RPI", C::diff_log},         {"DPCERA3M086SBEA", C::diff_log}, {"CMRMTSPLx", C::diff_log},
      {"INDPRO", C::diff_log},      {"CUMFNS", C::diff},              {"UNRATE", C::diff},
      {"PAYEMS", C::diff_log},      {"CES0600000007", C::none},       {"CES0600000008", C::diff_log},
      {"WPSFD49207", C::diff2_log}, {"PPICMM", C::diff2_log},         {"PCEPI", C::diff2_log},
      {"FEDFUNDS", C::none},        {"HOUST", C::log},                {"S&P 500", C::diff_log},
      {"EXUSUKx", C::diff_log},     {"T1YFFM", C::none},              {"T10YFFM", C::none},
      {"BAAFFM", C::none},          {"NAPMNOI", C::none}};
  const CodeMap m = fred_md_code_map();
  CHECK(m.size() == table.size());
  for (const auto& [name, code] : table) {
    INFO(name);
    REQUIRE(m.count(name) == 1);
    CHECK(m.at(name) == code);
  }
  const auto order = fred_md_variables();
  CHECK(order.size() == 20);
  CHECK(order[0] == "INDPRO");
  CHECK(order[1] == "UNRATE");
  CHECK(order[2] == "PCEPI");
  CHECK(order[3] == "FEDFUNDS");
  for (const auto& v : order) CHECK(m.count(v) == 1);

  // synthetic file with every mnemonic: codes survive the write/read round trip
  TempDir dir;
  std::vector<std::string> names;
  std::vector<TransformCode> codes;
  for (const auto& [name, code] : table) {
    names.push_back(name);
    codes.push_back(code);
  }
  const std::string path = (dir.path / "codes.csv").string();
  write_code_map(path, names, codes);
  CHECK(read_code_map(path) == m);

  std::string body = "date";
  for (const auto& nme : names) body += "," + nme;
  body += "\n";
  for (int t = 0; t < 8; ++t) {
    body += "r" + std::to_string(t);
    for (std::size_t j = 0; j < names.size(); ++j) body += "," + std::to_string(10.0 + t * t + static_cast<double>(j));
    body += "\n";
  }
  const Dataset ds = load_csv(dir.file("fred.csv", body), m);
  CHECK(ds.n() == 20);
  CHECK(ds.codes == codes);
  CHECK(ds.transformed.rows() == 6);  // second differences consume two rows
  CHECK(ds.transformed_dates.front() == "r2");
  CHECK(ds.level_flags[static_cast<std::size_t>(ds.index_of("HOUST"))]);
  CHECK_FALSE(ds.level_flags[static_cast<std::size_t>(ds.index_of("RPI"))]);
  CHECK(ds.transformed(0, ds.index_of("HOUST")) == doctest::Approx(std::log(10.0 + 4 + 13)));
}

TEST_CASE("load_csv basics") {
  TempDir dir;
  const Dataset plain = load_csv(dir.file("a.csv", "date,a,b\n1,1.5,2\n2,3,-4\n3,5,6e-3\n"));
  CHECK(plain.transformed.rows() == 3);
  CHECK(plain.transformed == plain.raw);
  CHECK(plain.names == std::vector<std::string>{"a", "b"});
  CHECK(plain.transformed(2, 1) == 6e-3);

  const Dataset lead = load_csv(dir.file("b.csv", "date,a,b\n1,,2\n2,3,4\n3,5,7\n4,6,9\n"),
                                {{"a", TransformCode::none}, {"b", TransformCode::diff}});
  CHECK(lead.transformed.rows() == 3);
  CHECK(lead.first_row == 1);
  CHECK(lead.transformed(0, 1) == 2.0);

  CHECK_THROWS_AS(load_csv(dir.file("c.csv", "date,a,b\n1,1,2\n2,3\n")), InputError);
  CHECK_THROWS_AS(load_csv(dir.file("d.csv", "date,a\n1,1\n"), {{"zz", TransformCode::none}}), InputError);
  CHECK_THROWS_AS(load_csv(dir.file("e.csv", "date,a,b\n1,,2\n2,,3\n")), InputError);
  CHECK_THROWS_AS(load_csv(dir.file("f.csv", "date,a\n1,1\n2,x\n")), InputError);
  CHECK_THROWS_AS(load_csv(dir.file("g.csv", "date,a\n1,1\n2,\n3,4\n")), InputError);
  CHECK_THROWS_AS(load_csv((dir.path / "missing.csv").string()), InputError);
}

TEST_CASE("transformed data round-trips bit-exactly") {
  TempDir dir;
  std::string body = "date,x,y,z\n";
  for (int t = 0; t < 30; ++t) {
    body += std::to_string(t) + "," + std::to_string(100.0 + 0.37 * t + std::sin(t)) + "," +
            std::to_string(0.1 + t * t * 0.001) + "," + std::to_string(std::cos(0.3 * t)) + "\n";
  }
  const Dataset ds = load_csv(dir.file("in.csv", body),
                              {{"x", TransformCode::diff_log}, {"y", TransformCode::diff2_log}, {"z", TransformCode::diff}});
  const std::string out = (dir.path / "out.csv").string();
  write_transformed_csv(out, ds);
  const Dataset back = load_csv(out);
  CHECK(back.names == ds.names);
  CHECK(back.dates == ds.transformed_dates);
  CHECK(back.transformed.rows() == ds.transformed.rows());
  CHECK((back.transformed.array() == ds.transformed.array()).all());
}

TEST_CASE("dataset permutation and truncation") {
  Eigen::MatrixXd raw(4, 3);
  raw << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const Dataset ds = make_dataset({"a", "b", "c"}, {"1", "2", "3", "4"}, raw,
                                  {TransformCode::none, TransformCode::log, TransformCode::diff});
  const PermutationMap rev = PermutationMap::reversed(3);
  const Dataset twice = ds.permuted(rev).permuted(rev);
  CHECK(twice.names == ds.names);
  CHECK(twice.transformed == ds.transformed);
  CHECK(twice.codes == ds.codes);
  const Dataset once = ds.permuted(rev);
  CHECK(once.names.front() == "c");
  CHECK(once.level_flags == std::vector<bool>{false, true, true});
  CHECK(once.transformed.col(0) == ds.transformed.col(2));
  CHECK(ds.truncated(2).transformed.rows() == 2);
  CHECK_THROWS_AS(ds.truncated(9), InputError);
  CHECK_THROWS_AS(ds.index_of("q"), InputError);
}
