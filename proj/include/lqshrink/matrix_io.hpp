#pragma once

#include <filesystem>

#include <Eigen/Core>

namespace lqshrink {

// Matrix files start with a text header line "<rows> <cols>". The payload is chosen by extension:
//   .csv  one text line per row, comma separated
//   .bin  rows*cols little-endian IEEE-754 float64 values, row-major, right after the header line
// Throws IoError on missing files or malformed content.
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);

}  // namespace lqshrink
