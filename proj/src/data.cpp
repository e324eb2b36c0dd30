#include "canonscreen/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "canonscreen/csv.hpp"
#include "canonscreen/error.hpp"
#include "canonscreen/rng.hpp"

namespace canonscreen {

std::string_view side_name(Side side) noexcept {
  return side == Side::Protein ? "protein" : "ligand";
}

DescriptorMatrix::DescriptorMatrix(Eigen::MatrixXd values, std::vector<std::string> column_names,
                                   std::vector<std::string> row_ids)
    : values_(std::move(values)),
      column_names_(std::move(column_names)),
      row_ids_(std::move(row_ids)) {
  if (values_.rows() < 1 || values_.cols() < 1)
    throw Error(ErrorCode::InvalidArgument, "descriptor matrix needs at least one row and column");
  if (static_cast<Eigen::Index>(row_ids_.size()) != values_.rows())
    throw Error(ErrorCode::DimensionMismatch, "row id count does not match row count");
  if (static_cast<Eigen::Index>(column_names_.size()) != values_.cols())
    throw Error(ErrorCode::DimensionMismatch, "column name count does not match column count");
  if (!values_.allFinite()) throw Error(ErrorCode::NonFinite, "descriptor matrix has NaN or Inf entries");
  std::unordered_set<std::string> seen;
  for (const auto& id : row_ids_)
    if (!seen.insert(id).second) throw Error(ErrorCode::DuplicateId, id);
}

DescriptorMatrix DescriptorMatrix::from_values(Eigen::MatrixXd values) {
  std::vector<std::string> ids(static_cast<std::size_t>(values.rows()));
  std::vector<std::string> names(static_cast<std::size_t>(values.cols()));
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = "r" + std::to_string(i + 1);
  for (std::size_t j = 0; j < names.size(); ++j) names[j] = "c" + std::to_string(j + 1);
  return DescriptorMatrix(std::move(values), std::move(names), std::move(ids));
}

std::optional<std::size_t> DescriptorMatrix::index_of(const std::string& id) const {
  const auto it = std::find(row_ids_.begin(), row_ids_.end(), id);
  if (it == row_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - row_ids_.begin());
}

DescriptorMatrix DescriptorMatrix::select_rows(std::span<const std::size_t> indices) const {
  Eigen::MatrixXd picked(static_cast<Eigen::Index>(indices.size()), values_.cols());
  std::vector<std::string> ids;
  ids.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    picked.row(static_cast<Eigen::Index>(r)) = values_.row(static_cast<Eigen::Index>(indices[r]));
    ids.push_back(row_ids_.at(indices[r]));
  }
  return DescriptorMatrix(std::move(picked), column_names_, std::move(ids));
}

DescriptorMatrix DescriptorMatrix::with_values(Eigen::MatrixXd values) const {
  return DescriptorMatrix(std::move(values), column_names_, row_ids_);
}

PairedDataset::PairedDataset(DescriptorMatrix proteins, DescriptorMatrix ligands)
    : proteins_(std::move(proteins)), ligands_(std::move(ligands)) {
  if (proteins_.rows() != ligands_.rows())
    throw Error(ErrorCode::DimensionMismatch, "protein and ligand row counts differ");
  if (proteins_.row_ids() != ligands_.row_ids())
    throw Error(ErrorCode::DimensionMismatch, "protein and ligand row ids are not aligned");
}

PairedDataset PairedDataset::select_rows(std::span<const std::size_t> indices) const {
  return PairedDataset(proteins_.select_rows(indices), ligands_.select_rows(indices));
}

namespace {

std::pair<Eigen::MatrixXd, SideScaling> center_side(const Eigen::MatrixXd& x, bool standardize) {
  const auto n = x.rows();
  SideScaling s;
  s.mean = x.colwise().mean().transpose();
  s.scale = Eigen::VectorXd::Ones(x.cols());
  s.zero_variance.assign(static_cast<std::size_t>(x.cols()), false);
  Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(n - 1));
    const double magnitude = std::max(1.0, std::abs(s.mean(j)));
    if (!(sd > 1e-12 * magnitude)) {
      s.zero_variance[static_cast<std::size_t>(j)] = true;
      centered.col(j).setZero();
    } else if (standardize) {
      s.scale(j) = sd;
      centered.col(j) /= sd;
    }
  }
  return {std::move(centered), std::move(s)};
}

}  // namespace

CenteredData center_and_scale(const PairedDataset& data, bool standardize) {
  if (data.size() < 2) throw Error(ErrorCode::InvalidArgument, "centering needs at least two rows");
  auto [xp, sp] = center_side(data.proteins().values(), standardize);
  auto [xl, sl] = center_side(data.ligands().values(), standardize);
  return CenteredData{
      PairedDataset(data.proteins().with_values(std::move(xp)), data.ligands().with_values(std::move(xl))),
      CenteringRecord{std::move(sp), std::move(sl)}};
}

Eigen::VectorXd apply_centering(const CenteringRecord& record, const Eigen::VectorXd& x, Side side) {
  const auto& s = record.side(side);
  if (x.size() != s.mean.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(side_name(side)) + " vector has " + std::to_string(x.size()) +
                    " entries, expected " + std::to_string(s.mean.size()));
  return ((x - s.mean).array() / s.scale.array()).matrix();
}

DescriptorMatrix apply_centering(const CenteringRecord& record, const DescriptorMatrix& x, Side side) {
  const auto& s = record.side(side);
  if (x.cols() != s.mean.size())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(side_name(side)) + " data has " + std::to_string(x.cols()) +
                    " columns, expected " + std::to_string(s.mean.size()));
  Eigen::MatrixXd out = x.values().rowwise() - s.mean.transpose();
  out.array().rowwise() /= s.scale.transpose().array();
  return x.with_values(std::move(out));
}

TrainTest split_train_test(const PairedDataset& data, const SplitSpec& spec) {
  const std::size_t n = data.size();
  std::vector<bool> in_test(n, false);
  if (const auto* random = std::get_if<RandomSplit>(&spec)) {
    if (!(random->fraction >= 0.0 && random->fraction <= 1.0))
      throw Error(ErrorCode::EmptySplit, "fraction must lie in [0, 1]");
    const auto n_train = static_cast<std::size_t>(std::llround(random->fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n)
      throw Error(ErrorCode::EmptySplit, "fraction " + csv::format_double(random->fraction) +
                                             " leaves an empty train or test set");
    Rng rng(random->seed);
    const auto order = rng.permutation(n);
    for (std::size_t i = n_train; i < n; ++i) in_test[order[i]] = true;
  } else {
    const auto& ids = std::get<IdSplit>(spec).test_ids;
    for (const auto& id : ids) {
      const auto idx = data.proteins().index_of(id);
      if (!idx) throw Error(ErrorCode::UnknownId, id);
      in_test[*idx] = true;
    }
  }
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < n; ++i) (in_test[i] ? test_idx : train_idx).push_back(i);
  if (train_idx.empty() || test_idx.empty())
    throw Error(ErrorCode::EmptySplit, "split leaves an empty train or test set");
  return TrainTest{data.select_rows(train_idx), data.select_rows(test_idx)};
}

DescriptorMatrix load_descriptor_csv(const std::filesystem::path& path, const std::string& id_column) {
  const auto table = csv::read(path);
  const auto id_it = std::find(table.header.begin(), table.header.end(), id_column);
  if (id_it == table.header.end())
    throw Error(ErrorCode::MissingIdColumn, "'" + id_column + "' not found in " + path.string());
  const auto id_pos = static_cast<std::size_t>(id_it - table.header.begin());
  std::vector<std::string> names;
  for (std::size_t j = 0; j < table.header.size(); ++j)
    if (j != id_pos) names.push_back(table.header[j]);
  if (table.rows.empty()) throw Error(ErrorCode::NoMatchedIds, path.string() + " has no data rows");

  Eigen::MatrixXd values(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(names.size()));
  std::vector<std::string> ids;
  ids.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw Error(ErrorCode::NonNumericCell, path.string() + " line " + std::to_string(r + 2) + " has " +
                                                 std::to_string(row.size()) + " fields, expected " +
                                                 std::to_string(table.header.size()));
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j == id_pos) continue;
      double v = 0.0;
      if (!csv::parse_double(row[j], v))
        throw Error(ErrorCode::NonNumericCell, path.string() + " line " + std::to_string(r + 2) +
                                                   " column '" + table.header[j] + "': '" + row[j] + "'");
      values(static_cast<Eigen::Index>(r), c++) = v;
    }
    ids.push_back(row[id_pos]);
  }
  return DescriptorMatrix(std::move(values), std::move(names), std::move(ids));
}

PairedDataset load_paired_csv(const std::filesystem::path& protein_path,
                              const std::filesystem::path& ligand_path, const std::string& id_column,
                              std::vector<std::string>* warnings) {
  const auto proteins = load_descriptor_csv(protein_path, id_column);
  const auto ligands = load_descriptor_csv(ligand_path, id_column);

  std::unordered_map<std::string, std::size_t> ligand_pos;
  for (std::size_t i = 0; i < ligands.row_ids().size(); ++i) ligand_pos.emplace(ligands.row_ids()[i], i);

  std::vector<std::size_t> keep_p, keep_l;
  std::vector<std::string> dropped;
  std::unordered_set<std::string> matched;
  for (std::size_t i = 0; i < proteins.row_ids().size(); ++i) {
    const auto& id = proteins.row_ids()[i];
    const auto it = ligand_pos.find(id);
    if (it == ligand_pos.end()) {
      dropped.push_back(id);
      continue;
    }
    keep_p.push_back(i);
    keep_l.push_back(it->second);
    matched.insert(id);
  }
  for (const auto& id : ligands.row_ids())
    if (!matched.count(id)) dropped.push_back(id);
  if (keep_p.empty())
    throw Error(ErrorCode::NoMatchedIds, protein_path.string() + " and " + ligand_path.string() +
                                             " share no ids");
  if (warnings && !dropped.empty()) {
    std::string msg = "dropped " + std::to_string(dropped.size()) + " unpaired id(s):";
    for (const auto& id : dropped) msg += " " + id;
    warnings->push_back(std::move(msg));
  }
  return PairedDataset(proteins.select_rows(keep_p), ligands.select_rows(keep_l));
}

void write_descriptor_csv(const std::filesystem::path& path, const DescriptorMatrix& matrix,
                          const std::string& id_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << csv::escape(id_column);
  for (const auto& name : matrix.column_names()) out << ',' << csv::escape(name);
  out << '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out << csv::escape(matrix.row_ids()[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) out << ',' << csv::format_double(matrix.values()(i, j));
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

}  // namespace canonscreen
