#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "canonscreen/cca.hpp"

namespace canonscreen {

struct NeighborHit {
  Eigen::Index index;
  double distance;
};

/// The k rows of `train` nearest to `query`, ascending by distance; ties go
/// to the smaller index.
std::vector<NeighborHit> knn_in_projection(const Eigen::MatrixXd& train, const Eigen::VectorXd& query, int k);

struct LleWeights {
  std::vector<Eigen::Index> neighbor_indices;
  std::vector<std::string> neighbor_ids;
  Eigen::VectorXd beta;  // sums to one
  bool ridge_applied = false;
};

/// Sum-to-one weights reconstructing `query` from the rows of `neighbors`.
LleWeights lle_weights(const Eigen::VectorXd& query, const Eigen::MatrixXd& neighbors);

struct PredictionResult {
  std::string query_id;
  Eigen::VectorXd protein_coords;
  Eigen::VectorXd predicted;  // canonical ligand coordinates
  LleWeights weights;
};

/// Transfers LLE weights found among training protein variates onto the
/// training ligand variates.
PredictionResult predict_from_coords(const CanonicalModel& model, const Eigen::VectorXd& protein_coords, int k_lle,
                                     std::string query_id = {});

/// `x_new` is a raw protein descriptor vector.
PredictionResult predict_ligand(const CanonicalModel& model, const Eigen::VectorXd& x_new, int k_lle,
                                std::string query_id = {});

std::vector<PredictionResult> predict_batch(const CanonicalModel& model, const DescriptorMatrix& proteins, int k_lle);

/// query_id, p coordinates, k neighbor ids, k weights.
void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionResult>& results);

}  // namespace canonscreen
