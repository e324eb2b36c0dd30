#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>

#include "canonscreen/data.hpp"

namespace canonscreen {

enum class KernelFamily { Linear, Rbf, Ngl };

std::string_view kernel_family_name(KernelFamily family) noexcept;
KernelFamily parse_kernel_family(std::string_view name);

struct KernelSpec {
  KernelFamily family = KernelFamily::Linear;
  double sigma = 1.0;  // Rbf bandwidth
  int k = 5;           // Ngl neighborhood size
  // Ngl only: use exp(-d^2 / (2 sigma_ij)) as printed, instead of the
  // self-tuning exp(-d^2 / (2 sigma_ij^2)).
  bool literal_bandwidth = false;

  static KernelSpec linear() { return {}; }
  static KernelSpec rbf(double sigma) { return {KernelFamily::Rbf, sigma, 5, false}; }
  static KernelSpec ngl(int k, bool literal_bandwidth = false) {
    return {KernelFamily::Ngl, 1.0, k, literal_bandwidth};
  }

  /// Throws InvalidArgument for sigma <= 0 or k < 1.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

enum class PsdStatus { Psd, Indefinite, Unknown };

std::string_view psd_status_name(PsdStatus status) noexcept;

struct KernelMatrix {
  Eigen::MatrixXd values;
  bool centered = false;
  PsdStatus psd_status = PsdStatus::Unknown;
  std::optional<double> eigen_floor;  // smallest eigenvalue, when it was computed
};

/// Symmetric k-nearest-neighbor graph of the training points, plus the
/// per-point quantities the NGL kernel needs out of sample.
struct NeighborhoodGraph {
  int k = 0;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacency;
  Eigen::VectorXd kth_neighbor_distance;
  Eigen::VectorXd degree;  // row sums of the masked affinity a
};

struct KreinDecomposition {
  Eigen::VectorXd positive_values;
  Eigen::MatrixXd positive_vectors;
  Eigen::VectorXd negative_values;
  Eigen::MatrixXd negative_vectors;
  Eigen::Index zero_count = 0;

  Eigen::Index p() const noexcept { return positive_values.size(); }
  Eigen::Index q() const noexcept { return negative_values.size(); }
  Eigen::MatrixXd reassemble() const;
};

/// Relative threshold below which eigenvalues count as zero.
inline constexpr double kZeroEigenTolerance = 1e-10;
/// lambda_min >= -kPsdTolerance * lambda_max counts as PSD.
inline constexpr double kPsdTolerance = 1e-8;

/// Euclidean distances between all rows.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x);

/// Symmetrized kNN graph (edge if j in kNN(i) or i in kNN(j)); ties go to
/// the smaller row index. Throws DegenerateBandwidth when a point's k-th
/// neighbor distance is zero.
NeighborhoodGraph knn_graph(const DescriptorMatrix& x, int k);

struct NglResult {
  KernelMatrix weights;
  NeighborhoodGraph graph;
};

/// Degree-normalized local affinity w_ij = a_ij / sqrt(deg_i deg_j) with a
/// self-tuning bandwidth sigma_ij^2 = r_i r_j (r = k-th neighbor distance)
/// and zero diagonal. The result is generally indefinite.
NglResult ngl_weights(const DescriptorMatrix& x, int k, bool literal_bandwidth = false);

/// Classifies symmetric `values` from its spectrum.
PsdStatus classify_psd(const Eigen::MatrixXd& values, double* min_eigenvalue = nullptr);

/// Uncentered Gram matrix; for Ngl the graph is returned through `graph`.
KernelMatrix gram(const KernelSpec& spec, const DescriptorMatrix& x,
                  NeighborhoodGraph* graph = nullptr);

/// (I - J/n) K (I - J/n).
KernelMatrix center_kernel(const KernelMatrix& k);

/// Training statistics needed to center out-of-sample kernel vectors.
struct KernelCenterer {
  Eigen::VectorXd column_means;
  double grand_mean = 0.0;

  static KernelCenterer from(const Eigen::MatrixXd& uncentered_gram);

  /// k_i - mean(k) - column_mean_i + grand_mean.
  Eigen::VectorXd center(const Eigen::VectorXd& k_new) const;
};

Eigen::VectorXd center_kernel_vector(const Eigen::VectorXd& k_new, const KernelMatrix& train_uncentered);

KreinDecomposition krein_decompose(const KernelMatrix& k);

/// Frobenius-nearest PSD matrix: eigenvalues clipped at zero.
KernelMatrix positive_part(const KernelMatrix& k0);

/// Kernel evaluations of x_new against every training row. `graph` is
/// required for Ngl and must come from the same training rows.
Eigen::VectorXd kernel_vector(const KernelSpec& spec, const DescriptorMatrix& x_train,
                              const NeighborhoodGraph* graph, const Eigen::VectorXd& x_new);
Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& x_train,
                              const NeighborhoodGraph* graph, const Eigen::VectorXd& x_new);

void write_kernel_csv(const std::filesystem::path& path, const KernelMatrix& k,
                      const std::vector<std::string>& row_ids);

}  // namespace canonscreen
