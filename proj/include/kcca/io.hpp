#pragma once

#include "kcca/data.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace kcca::io {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

/// Numeric CSV, optional header line. Values are written round-trip exact.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});
void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& v,
                      const std::string& column);
void write_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels);

/// Reads a rectangular numeric CSV. A first line that does not parse as
/// numbers is taken as the header. Errors name the offending line.
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* header = nullptr);

/// Header x1..xd,y1..yd, one sample pair per row.
void write_pairs_csv(const std::filesystem::path& path, const TrajectoryPairs& pairs);
TrajectoryPairs read_pairs_csv(const std::filesystem::path& path);

/// Binary snapshot matrix: "CMDX", u32 d, u32 n, 4 padding bytes, then d*n
/// little-endian doubles in row-major order.
void write_snapshot_binary(const std::filesystem::path& path, const Eigen::MatrixXd& m);
/// Reads the binary format, or a headerless/headed CSV of d rows and n columns.
Eigen::MatrixXd read_snapshot_file(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace kcca::io
