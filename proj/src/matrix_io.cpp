#include "lqshrink/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "lqshrink/error.hpp"

namespace lqshrink {

namespace {

static_assert(std::endian::native == std::endian::little, "binary matrix I/O assumes little endian");

enum class Payload { kCsv, kBinary };

Payload payload_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return Payload::kCsv;
  if (ext == ".bin") return Payload::kBinary;
  throw IoError("unsupported matrix file extension '" + ext + "' (" + path.string() + ")");
}

}  // namespace

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
  const Payload payload = payload_for(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open matrix file " + path.string());

  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  long long rows = -1;
  long long cols = -1;
  if (!(hs >> rows >> cols) || rows < 0 || cols < 0) {
    throw IoError("bad matrix header '" + header + "' in " + path.string());
  }
  Eigen::MatrixXd m(rows, cols);

  if (payload == Payload::kBinary) {
    std::vector<double> buf(static_cast<std::size_t>(rows * cols));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(double))) {
      throw IoError("truncated binary payload in " + path.string());
    }
    for (long long i = 0; i < rows; ++i)
      for (long long j = 0; j < cols; ++j) m(i, j) = buf[i * cols + j];
    return m;
  }

  std::string line;
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw IoError("missing row " + std::to_string(i) + " in " + path.string());
    std::istringstream ls(line);
    std::string cell;
    for (long long j = 0; j < cols; ++j) {
      if (!std::getline(ls, cell, ',')) {
        throw IoError("row " + std::to_string(i) + " has too few columns in " + path.string());
      }
      // strtod rather than stod: stod rejects subnormals because strtod flags them with ERANGE
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double x = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
      if (end == begin || *end != '\0' || (std::isinf(x) && cell.find("inf") == std::string::npos)) {
        throw IoError("bad number '" + cell + "' in " + path.string());
      }
      m(i, j) = x;
    }
    if (std::getline(ls, cell, ',')) {
      throw IoError("row " + std::to_string(i) + " has too many columns in " + path.string());
    }
  }
  return m;
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  const Payload payload = payload_for(path);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write matrix file " + path.string());
  out << m.rows() << ' ' << m.cols() << '\n';
  if (payload == Payload::kBinary) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        const double v = m(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
  } else {
    char buf[32];
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
        out << (j ? "," : "") << buf;
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lqshrink
