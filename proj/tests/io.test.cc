#include "spdcsim/io.h"

#include <filesystem>

#include "gtest/gtest.h"
#include "spdcsim/errors.h"

namespace spdcsim {
namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "spdcsim_io" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(io, AtomicWriteLeavesOnlyTheTarget) {
  const auto dir = scratch("atomic");
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  EXPECT_EQ(read_file(dir / "a.txt"), "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1);
}

TEST(io, AtomicWriteFailureLeavesNothing) {
  const auto dir = scratch("blocked");
  std::filesystem::create_directories(dir / "target.txt");  // a directory in the way
  EXPECT_ANY_THROW(write_file_atomic(dir / "target.txt", "data"));
  EXPECT_FALSE(std::filesystem::exists(dir / "target.txt.partial"));
}

TEST(io, TomographyCsvRoundTrip) {
  std::vector<CountRecord> records(2);
  records[0] = {"HH", std::nullopt, 7000, 7100, 63, 70.05, 0.05, 1.0};
  records[1] = {"RL", std::nullopt, 6900, 7050, 3411, 3500.5, 0.049, 1.0};
  const std::string text = format_tomography_csv(records, "spdcsim test config_hash=0 seed=1");
  EXPECT_EQ(text.rfind("# spdcsim test", 0), 0u);
  const auto parsed = parse_tomography_csv(text);
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[1].label, "RL");
  EXPECT_EQ(parsed[1].coincidences, 3411);
  EXPECT_EQ(parsed[1].singles_2, 7050);
  EXPECT_DOUBLE_EQ(parsed[1].expected_coincidences, 3500.5);
}

TEST(io, TomographyCsvMinimalColumns) {
  const auto parsed = parse_tomography_csv("setting,coincidences\nHH,5\nHV,700\n");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[0].coincidences, 5);
  EXPECT_EQ(parsed[0].singles_1, 0);
}

TEST(io, TomographyCsvErrors) {
  EXPECT_THROW(parse_tomography_csv("label,coincidences\nHH,5\n"), AnalysisError);
  EXPECT_THROW(parse_tomography_csv("setting,coincidences\nHH,five\n"), AnalysisError);
  EXPECT_THROW(parse_tomography_csv("setting,coincidences\nHH,5,6\n"), AnalysisError);
  EXPECT_THROW(parse_tomography_csv("setting,coincidences\nHH,-5\n"), AnalysisError);
  EXPECT_THROW(parse_tomography_csv("setting,coincidences\n"), AnalysisError);
  EXPECT_THROW(parse_tomography_csv("setting\nHH\n"), AnalysisError);
}

TEST(io, FringeCsvNeedsAngles) {
  std::vector<CountRecord> records(1);
  EXPECT_THROW(format_fringe_csv(records, "x"), AnalysisError);
  records[0].setting = AnalyzerSetting{45.0, 22.5};
  const std::string text = format_fringe_csv(records, "x");
  EXPECT_NE(text.find("\n45,22.5,"), std::string::npos);
}

TEST(io, MatrixBlocksRoundTrip) {
  Eigen::Matrix4cd m;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = {0.1 * r - 0.05 * c, 0.01 * (r - c)};
  }
  const std::string text = "[other]\nx = 1\n" + format_matrix_blocks("rho", m);
  EXPECT_NE(text.find("[rho.real]"), std::string::npos);
  EXPECT_NE(text.find("[rho.imag]"), std::string::npos);
  EXPECT_LT((parse_matrix_blocks(text, "rho") - m).norm(), 1e-11);
  EXPECT_THROW(parse_matrix_blocks(text, "sigma"), AnalysisError);
}

TEST(io, NegativeZeroIsNormalized) {
  Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
  Eigen::Matrix4cd b = Eigen::Matrix4cd::Zero();
  b(0, 1) = {-0.0, -1e-15};
  EXPECT_EQ(format_matrix_blocks("m", a), format_matrix_blocks("m", b));
}

}  // namespace
}  // namespace spdcsim
