#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>
#include <unistd.h>

#include "canonscreen/data.hpp"
#include "canonscreen/rng.hpp"

namespace testing {

inline const nlohmann::json& oracle() {
  static const nlohmann::json values = [] {
    std::ifstream in(CANONSCREEN_ORACLE_FILE);
    return nlohmann::json::parse(in);
  }();
  return values;
}

inline Eigen::MatrixXd matrix(const nlohmann::json& rows) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.at(0).size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows.at(i).at(j).get<double>();
  return m;
}

inline Eigen::VectorXd vector(const nlohmann::json& values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = values.at(i).get<double>();
  return v;
}

inline Eigen::MatrixXd gaussian(canonscreen::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

inline canonscreen::PairedDataset paired(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  return canonscreen::PairedDataset(canonscreen::DescriptorMatrix::from_values(x),
                                    canonscreen::DescriptorMatrix::from_values(y));
}

/// Scratch directory removed on destruction.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("canonscreen_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const { return path / name; }
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

}  // namespace testing
