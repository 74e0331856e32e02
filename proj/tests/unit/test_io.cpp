#include "lrsm/error.hpp"
#include "lrsm/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace lrsm;

TEST(Io, DenseRoundTripIsBitExact) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  DenseMatrix m(4, 3);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = nd(gen) * 1e-7;
  m(0, 0) = 1.0 / 3.0;
  std::stringstream ss;
  io::write_dense(ss, m);
  const DenseMatrix back = io::read_dense(ss);
  EXPECT_TRUE((back.array() == m.array()).all());
}

TEST(Io, DenseHeaderAndShapeErrors) {
  std::istringstream bad_header("2\n1,2\n");
  EXPECT_THROW(io::read_dense(bad_header), ArgumentError);
  std::istringstream short_row("2,2\n1,2\n3\n");
  EXPECT_THROW(io::read_dense(short_row), ArgumentError);
  std::istringstream extra("1,1\n1\n2\n");
  EXPECT_THROW(io::read_dense(extra), ArgumentError);
  std::istringstream junk("1,1\n1x\n");
  EXPECT_THROW(io::read_dense(junk), ArgumentError);
  std::istringstream nan("1,1\nnan\n");
  EXPECT_THROW(io::read_dense(nan), ArgumentError);
}

TEST(Io, BlankLinesAndSpacesTolerated) {
  std::istringstream in("\n2, 2\n 1, 2\n\n3,4 \n");
  const DenseMatrix m = io::read_dense(in);
  EXPECT_EQ(m(1, 0), 3.0);
  EXPECT_EQ(m(0, 1), 2.0);
}

TEST(Io, SparseRoundTrip) {
  const SparseEntrySet s(3, 3, {{2, 1, -0.25}, {0, 2, 1e-300}});
  std::stringstream ss;
  io::write_sparse(ss, s);
  const SparseEntrySet back = io::read_sparse(ss, 3, 3);
  EXPECT_EQ(back.entries(), s.entries());
  std::istringstream dup("0,0,1\n0,0,2\n");
  EXPECT_THROW(io::read_sparse(dup, 2, 2), ArgumentError);
}

TEST(Io, StatesRoundTrip) {
  const std::vector<std::int64_t> states{0, 3, 1, 1, 2};
  std::stringstream ss;
  io::write_states(ss, states);
  EXPECT_EQ(io::read_states(ss), states);
}

TEST(Io, MissingFilesAreIoErrors) {
  EXPECT_THROW(io::load_dense("/nonexistent/dir/m.csv"), IoError);
  EXPECT_THROW(io::save_dense("/nonexistent/dir/m.csv", DenseMatrix::Zero(1, 1)), IoError);
  EXPECT_THROW(io::read_text_file("/nonexistent/file"), IoError);
}

TEST(Io, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "lrsm_io_roundtrip.csv";
  const DenseMatrix m = DenseMatrix::Identity(3, 2) * 2.5;
  io::save_dense(path.string(), m);
  EXPECT_TRUE(io::load_dense(path.string()).isApprox(m, 0.0));
  std::filesystem::remove(path);
}
