#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "lqshrink/error.hpp"
#include "lqshrink/matrix_io.hpp"

using namespace lqshrink;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("lqshrink_io_" + name);
}

Eigen::MatrixXd sample() {
  Eigen::MatrixXd m(2, 3);
  m << 0.1, -2.5e-300, 3.0, std::numeric_limits<double>::denorm_min(), 1.0 / 3.0, -0.0;
  return m;
}

}  // namespace

TEST_CASE("csv and binary round trips are exact") {
  for (const char* name : {"m.csv", "m.bin"}) {
    const auto path = temp_file(name);
    save_matrix(path, sample());
    const auto back = load_matrix(path);
    std::filesystem::remove(path);
    INFO(name);
    CHECK(back == sample());
  }
}

TEST_CASE("csv layout is a header line plus one line per row") {
  const auto path = temp_file("layout.csv");
  {
    std::ofstream(path) << "2 2\n1,2\n3,4.5\n";
  }
  const auto m = load_matrix(path);
  std::filesystem::remove(path);
  CHECK(m(1, 1) == 4.5);
  CHECK(m(0, 1) == 2.0);
}

TEST_CASE("bad matrix files raise IoError") {
  CHECK_THROWS_AS(load_matrix(temp_file("missing.csv")), IoError);
  CHECK_THROWS_AS(load_matrix(temp_file("m.txt")), IoError);
  const auto path = temp_file("bad.csv");
  for (const char* body : {"2 2\n1,2\n3\n", "x y\n", "1 2\n1,abc\n", "2 1\n1\n"}) {
    {
      std::ofstream(path) << body;
    }
    INFO(body);
    CHECK_THROWS_AS(load_matrix(path), IoError);
  }
  std::filesystem::remove(path);
  const auto bin = temp_file("short.bin");
  {
    std::ofstream(bin, std::ios::binary) << "3 3\n" << std::string(16, '\0');
  }
  CHECK_THROWS_AS(load_matrix(bin), IoError);
  std::filesystem::remove(bin);
}
