#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "canonscreen/cca.hpp"

namespace canonscreen {

/// 1 + number of candidates strictly closer to `actual` than the prediction.
int rank_of_prediction(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual, const Eigen::MatrixXd& embed);

struct QueryRank {
  std::string query_id;
  int rank = 0;
  int candidates_total = 0;
  bool ok = true;
  std::string error;
};

struct ScreenReport {
  std::vector<QueryRank> per_query;
  double mean_rank = 0.0;  // over successful queries; NaN if none
  int failed = 0;
  int embed_size = 0;
  int embed_failed = 0;    // embed ligands that could not be projected
  int k_lle = 0;
  std::string config_json; // method and hyperparameters as a JSON object
};

/// Each test protein's predicted canonical ligand location is ranked against
/// the projected embed ligands; the query's own ligand (matched by id) is
/// the target and is left out of the candidates.
ScreenReport run_screen(const CanonicalModel& model, int k_lle, const PairedDataset& queries,
                        const DescriptorMatrix& embed);

/// JSON object describing a fitted model's configuration.
std::string describe_model(const CanonicalModel& model);

std::string screen_report_json(const ScreenReport& report);
void write_screen_csv(const std::filesystem::path& path, const ScreenReport& report);
void write_screen_json(const std::filesystem::path& path, const ScreenReport& report);

struct TuningGrid {
  std::vector<double> kappa_values;
  std::vector<int> p_values;
  std::vector<int> k_lle_values;
  std::vector<double> kernel_param_values;  // sigma for Rbf, k for Ngl; empty for linear

  /// Three values per axis; no kernel axis for linear CCA or linear kernels.
  static TuningGrid defaults(Method method, KernelFamily kernel);
  std::size_t size() const;
  void validate(bool needs_kernel_axis) const;
};

struct GridConfig {
  double kappa = 0.0;
  int p = 0;
  int k_lle = 0;
  std::optional<double> kernel_param;

  bool operator==(const GridConfig&) const = default;
};

/// True if `a` is preferred over `b` at equal score: smaller p, larger kappa,
/// smaller k_lle, smaller kernel parameter.
bool tie_break_less(const GridConfig& a, const GridConfig& b);

struct TuneSpec {
  Method method = Method::Cca;
  KernelFamily kernel = KernelFamily::Linear;
  bool literal_bandwidth = false;
  SolverOptions options;  // kappa and p are taken from the grid
  int folds = 5;
  std::uint64_t seed = 0;
};

/// Kernel spec for one grid value.
KernelSpec kernel_for(const TuneSpec& spec, std::optional<double> param);

struct CvRow {
  GridConfig config;
  bool feasible = true;
  double mean_rank = 0.0;
  int evaluated = 0;  // query ranks contributing
  int failed = 0;     // queries whose projection failed
  std::string note;
};

struct GridResult {
  std::vector<CvRow> table;  // grid enumeration order: kappa, p, k_lle, kernel value
  std::optional<GridConfig> best;
  double best_score = 0.0;
};

/// Exhaustive k-fold cross-validated grid search on mean rank. Each fold's
/// held-out pairs are queries ranked against the full training ligand set.
GridResult grid_search(const PairedDataset& train, const TuneSpec& spec, const TuningGrid& grid);

void write_cv_csv(const std::filesystem::path& path, const GridResult& result);
std::string cv_json(const GridResult& result);

/// Lloyd's algorithm with k-means++ seeding; the lowest-inertia of
/// `restarts` runs wins. Labels are 0-based.
std::vector<int> kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, int restarts = 10,
                        int max_iterations = 300);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace canonscreen
