#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace canonscreen {

enum class Side { Protein, Ligand };

std::string_view side_name(Side side) noexcept;

/// Observations in rows, descriptors in columns, with unique row ids.
///
/// Construction validates the invariants (finite entries, unique ids,
/// matching name counts, at least one row and column) and throws Error on
/// violation; instances are immutable afterwards.
class DescriptorMatrix {
 public:
  DescriptorMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names,
                   std::vector<std::string> row_ids);

  /// Generates ids "r1.." and column names "c1..".
  static DescriptorMatrix from_values(Eigen::MatrixXd values);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  const std::vector<std::string>& column_names() const noexcept { return column_names_; }
  const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }

  std::optional<std::size_t> index_of(const std::string& id) const;

  DescriptorMatrix select_rows(std::span<const std::size_t> indices) const;

  /// Same ids and column names, new values of identical shape.
  DescriptorMatrix with_values(Eigen::MatrixXd values) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> column_names_;
  std::vector<std::string> row_ids_;
};

/// Protein and ligand descriptors paired row by row through shared ids.
class PairedDataset {
 public:
  PairedDataset(DescriptorMatrix proteins, DescriptorMatrix ligands);

  const DescriptorMatrix& proteins() const noexcept { return proteins_; }
  const DescriptorMatrix& ligands() const noexcept { return ligands_; }
  const DescriptorMatrix& side(Side s) const noexcept {
    return s == Side::Protein ? proteins_ : ligands_;
  }
  const std::vector<std::string>& ids() const noexcept { return proteins_.row_ids(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(proteins_.rows()); }

  PairedDataset select_rows(std::span<const std::size_t> indices) const;

 private:
  DescriptorMatrix proteins_;
  DescriptorMatrix ligands_;
};

struct SideScaling {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;  // strictly positive; 1 where standardization is off or variance is zero
  std::vector<bool> zero_variance;
};

struct CenteringRecord {
  SideScaling protein;
  SideScaling ligand;

  const SideScaling& side(Side s) const noexcept { return s == Side::Protein ? protein : ligand; }
};

struct CenteredData {
  PairedDataset data;
  CenteringRecord record;
};

/// Column-centers both sides; with standardize, also divides by the sample
/// (n-1) standard deviation. Zero-variance columns keep scale 1 and are flagged.
CenteredData center_and_scale(const PairedDataset& data, bool standardize);

/// (x - mean) / scale for one observation of the given side.
Eigen::VectorXd apply_centering(const CenteringRecord& record, const Eigen::VectorXd& x, Side side);

DescriptorMatrix apply_centering(const CenteringRecord& record, const DescriptorMatrix& x, Side side);

struct RandomSplit {
  double fraction;  // share of rows assigned to the training set
  std::uint64_t seed;
};

struct IdSplit {
  std::vector<std::string> test_ids;
};

using SplitSpec = std::variant<RandomSplit, IdSplit>;

struct TrainTest {
  PairedDataset train;
  PairedDataset test;
};

/// Both parts keep the original relative row order.
TrainTest split_train_test(const PairedDataset& data, const SplitSpec& spec);

/// Reads one descriptor CSV; every non-id column must parse as a double.
DescriptorMatrix load_descriptor_csv(const std::filesystem::path& path, const std::string& id_column);

/// Inner-joins two descriptor files on id_column, keeping the protein
/// file's row order. Ids present in only one file are dropped and reported
/// through `warnings` when given.
PairedDataset load_paired_csv(const std::filesystem::path& protein_path,
                              const std::filesystem::path& ligand_path,
                              const std::string& id_column,
                              std::vector<std::string>* warnings = nullptr);

void write_descriptor_csv(const std::filesystem::path& path, const DescriptorMatrix& matrix,
                          const std::string& id_column = "id");

}  // namespace canonscreen
