#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "support.hpp"

using namespace evpos;
using namespace evpos::test;

namespace {

std::string error_of(const std::string& text) {
  try {
    matrix_from_json(parse_json_text(text, "input.json"), "input.json");
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("evpos_test_io_" + name)).string();
}

}  // namespace

TEST(MatrixFile, ParsesFixture) {
  const auto m = read_matrix_file(std::string(EVPOS_FIXTURES) + "/rotation.json");
  EXPECT_EQ(m, real_matrix({{0, -1}, {1, 0}}));
}

TEST(MatrixFile, RoundTripIsExact) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto m = random_matrix(1 + seed % 7, seed, 1e3 * static_cast<double>(seed));
    const auto back = matrix_from_json(parse_json_text(format_matrix_file(m), "mem"));
    EXPECT_EQ(back, m);  // bit-for-bit
  }
  const auto m = random_matrix(3, 5);
  const auto path = temp_path("round.json");
  write_matrix_file(path, m);
  EXPECT_EQ(read_matrix_file(path), m);
  std::remove(path.c_str());
}

TEST(MatrixFile, ErrorsNameTheLocation) {
  EXPECT_NE(error_of("{\"rows\": 1,\n \"cols\": 1, \"entries\": [[[1, 0]]] ").find("line 2"), std::string::npos);
  EXPECT_NE(error_of(R"({"rows": 1, "cols": 1})").find("missing field 'entries'"), std::string::npos);
  EXPECT_NE(error_of(R"({"rows": 2, "cols": 1, "entries": [[[1, 0]]]})").find("input.json.entries"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"rows": 2, "cols": 2, "entries": [[[1, 0], [0, 0]], [[0, 0], [1]]]})")
                .find("input.json.entries[1][1]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"rows": 1, "cols": 1, "entries": [[["x", 0]]]})").find("entries[0][0][0]"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"rows": -1, "cols": 1, "entries": []})").find("rows and cols"), std::string::npos);
  EXPECT_THROW(read_matrix_file("/nonexistent/matrix.json"), ParseError);
}

TEST(MatrixFile, RowsColsMustMatchEntries) {
  EXPECT_FALSE(error_of(R"({"rows": 1, "cols": 2, "entries": [[[1, 0]]]})").empty());
  EXPECT_TRUE(error_of(R"({"rows": 1, "cols": 2, "entries": [[[1, 0], [2, 0]]]})").empty());
}

TEST(Json, ComplexAsPairsAndStableFieldOrder) {
  EXPECT_EQ(to_json(Complex(1.5, -2.0)).dump(), "[1.5,-2.0]");
  const auto j = to_json(spectrum_report(real_matrix({{0, -1}, {1, 0}})));
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  ASSERT_GE(keys.size(), 3u);
  EXPECT_EQ(keys[0], "spectral_bound");
  EXPECT_EQ(keys[1], "spectral_radius");
  EXPECT_EQ(keys[2], "peripheral_set");
}

TEST(Json, CheckReportSchema) {
  const auto r = check_lemma53(real_matrix({{-1, 1}, {1, -1}}));
  const auto j = to_json(r);
  for (const char* key : {"theorem_id", "verdict", "hypotheses", "conclusions", "tolerances", "witnesses", "notes", "seed"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j["theorem_id"], "lem-5.3");
  EXPECT_EQ(j["verdict"], "confirmed");
  EXPECT_EQ(to_json(r).dump(), to_json(check_lemma53(real_matrix({{-1, 1}, {1, -1}}))).dump());
}

TEST(Json, MetadataMirrorsGroundTruth) {
  const auto b = generate(Family::evpos_semigroup, 4, 7);
  const auto j = metadata_json(b);
  EXPECT_EQ(j["family"], "evpos-semigroup");
  EXPECT_EQ(j["seed"], 7);
  EXPECT_DOUBLE_EQ(j["ground_truth"]["spectral_bound"].get<double>(), *b.ground_truth.spectral_bound);
  EXPECT_EQ(matrix_from_json(j["ground_truth"]["projection"]), *b.ground_truth.projection);
  EXPECT_EQ(j["ground_truth"]["expected_verdicts"]["lem-5.3"], "confirmed");
}
