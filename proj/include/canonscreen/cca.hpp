#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "canonscreen/data.hpp"
#include "canonscreen/kernels.hpp"

namespace canonscreen {

enum class Method { Cca, Kcca, Ikcca };

std::string_view method_name(Method method) noexcept;
Method parse_method(std::string_view name);

/// How IKCCA kernelizes out-of-sample points.
enum class ProjectionMode {
  Indefinite,  // raw (possibly indefinite) kernel vector
  Clipped,     // kernel vector projected onto the positive eigenspace of the training Gram
};

std::string_view projection_mode_name(ProjectionMode mode) noexcept;
ProjectionMode parse_projection_mode(std::string_view name);

struct SolverOptions {
  double kappa = 0.1;
  int p = 2;
  double jitter = 1e-10;  // relative floor below which constraint eigenvalues count as null
  bool standardize = true;
  ProjectionMode projection = ProjectionMode::Indefinite;

  void validate() const;
};

/// Correlations at or below this count as "no direction".
inline constexpr double kMinCorrelation = 1e-8;

/// Everything the model keeps for one side.
struct SideModel {
  KernelSpec spec;                        // unused by linear CCA
  std::vector<std::string> column_names;  // descriptor names of this side
  Eigen::MatrixXd training;               // centered/scaled training descriptors
  Eigen::MatrixXd gram;                   // uncentered Gram the solver used (positive part for IKCCA)
  Eigen::MatrixXd indefinite_gram;        // IKCCA: uncentered raw Gram
  Eigen::MatrixXd clip_projector;         // IKCCA: projector onto the positive eigenspace of the raw Gram
  std::optional<NeighborhoodGraph> graph; // Ngl only
  Eigen::MatrixXd directions;             // d x p (linear) or n x p (dual)
  Eigen::MatrixXd variates;               // in-sample canonical variates, n x p
};

struct CanonicalModel {
  Method method = Method::Cca;
  ProjectionMode projection = ProjectionMode::Indefinite;
  double kappa = 0.0;
  double jitter = 1e-10;
  bool standardize = true;
  int requested_p = 0;
  int p = 0;
  bool rank_deficient = false;
  Eigen::VectorXd correlations;
  CenteringRecord centering;
  std::vector<std::string> training_ids;
  SideModel protein;
  SideModel ligand;

  const SideModel& side(Side s) const noexcept { return s == Side::Protein ? protein : ligand; }
  bool is_kernel() const noexcept { return method != Method::Cca; }

  /// Copy keeping only the leading `p` directions (p <= this->p).
  CanonicalModel truncated(int p) const;
};

struct Projection {
  Eigen::MatrixXd coords;  // m x p
  Side side = Side::Protein;
  std::vector<std::string> ids;
};

/// Regularized linear CCA; descriptors are centered (and optionally
/// standardized) internally.
CanonicalModel fit_linear_cca(const PairedDataset& data, const SolverOptions& opts);

CanonicalModel fit_kcca(const PairedDataset& data, const KernelSpec& protein_kernel,
                        const KernelSpec& ligand_kernel, const SolverOptions& opts);

/// KCCA on the positive parts of the (possibly indefinite) Grams.
CanonicalModel fit_ikcca(const PairedDataset& data, const KernelSpec& protein_kernel,
                         const KernelSpec& ligand_kernel, const SolverOptions& opts);

struct FitConfig {
  Method method = Method::Cca;
  KernelSpec protein_kernel;
  KernelSpec ligand_kernel;
  SolverOptions options;
};

CanonicalModel fit(const PairedDataset& data, const FitConfig& config);

/// Canonical coordinates of raw descriptor rows.
Projection project(const CanonicalModel& model, const DescriptorMatrix& points, Side side);

/// Single raw descriptor vector.
Eigen::VectorXd project_point(const CanonicalModel& model, const Eigen::VectorXd& x, Side side);

}  // namespace canonscreen
