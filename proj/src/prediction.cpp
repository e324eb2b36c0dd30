#include "canonscreen/prediction.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <fstream>

#include "canonscreen/csv.hpp"
#include "canonscreen/error.hpp"
#include "canonscreen/parallel.hpp"

namespace canonscreen {

namespace {
constexpr double kMaxCondition = 1e12;
constexpr double kRidgeScale = 1e-9;
}  // namespace

std::vector<NeighborHit> knn_in_projection(const Eigen::MatrixXd& train, const Eigen::VectorXd& query, int k) {
  const Eigen::Index n = train.rows();
  if (k < 1 || k > n)
    throw Error(ErrorCode::InvalidArgument,
                "k=" + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
  if (query.size() != train.cols())
    throw Error(ErrorCode::DimensionMismatch, "query dimension " + std::to_string(query.size()) +
                                                  " does not match " + std::to_string(train.cols()));
  std::vector<NeighborHit> hits(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) hits[static_cast<std::size_t>(i)] = {i, (train.row(i).transpose() - query).norm()};
  std::partial_sort(hits.begin(), hits.begin() + k, hits.end(), [](const NeighborHit& a, const NeighborHit& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  });
  hits.resize(static_cast<std::size_t>(k));
  return hits;
}

LleWeights lle_weights(const Eigen::VectorXd& query, const Eigen::MatrixXd& neighbors) {
  const Eigen::Index k = neighbors.rows();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "lle_weights needs at least one neighbor");
  if (query.size() != neighbors.cols())
    throw Error(ErrorCode::DimensionMismatch, "query and neighbor dimensions differ");
  const Eigen::MatrixXd diff = (-neighbors).rowwise() + query.transpose();
  Eigen::MatrixXd g = diff * diff.transpose();

  LleWeights out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    const double trace = g.trace();
    g.diagonal().array() += trace > 0.0 ? kRidgeScale * trace / static_cast<double>(k) : kRidgeScale;
    out.ridge_applied = true;
  }
  const Eigen::VectorXd raw = g.ldlt().solve(Eigen::VectorXd::Ones(k));
  out.beta = raw / raw.sum();
  return out;
}

PredictionResult predict_from_coords(const CanonicalModel& model, const Eigen::VectorXd& protein_coords, int k_lle,
                                     std::string query_id) {
  const auto hits = knn_in_projection(model.protein.variates, protein_coords, k_lle);
  Eigen::MatrixXd neighbors(k_lle, model.p);
  Eigen::MatrixXd ligand(k_lle, model.p);
  for (int j = 0; j < k_lle; ++j) {
    neighbors.row(j) = model.protein.variates.row(hits[static_cast<std::size_t>(j)].index);
    ligand.row(j) = model.ligand.variates.row(hits[static_cast<std::size_t>(j)].index);
  }
  PredictionResult r;
  r.query_id = std::move(query_id);
  r.protein_coords = protein_coords;
  r.weights = lle_weights(protein_coords, neighbors);
  for (const auto& h : hits) {
    r.weights.neighbor_indices.push_back(h.index);
    r.weights.neighbor_ids.push_back(model.training_ids[static_cast<std::size_t>(h.index)]);
  }
  r.predicted = ligand.transpose() * r.weights.beta;
  return r;
}

PredictionResult predict_ligand(const CanonicalModel& model, const Eigen::VectorXd& x_new, int k_lle,
                                std::string query_id) {
  return predict_from_coords(model, project_point(model, x_new, Side::Protein), k_lle, std::move(query_id));
}

std::vector<PredictionResult> predict_batch(const CanonicalModel& model, const DescriptorMatrix& proteins, int k_lle) {
  const Projection proj = project(model, proteins, Side::Protein);
  std::vector<PredictionResult> out(static_cast<std::size_t>(proteins.rows()));
  parallel_for(out.size(), [&](std::size_t i) {
    out[i] = predict_from_coords(model, proj.coords.row(static_cast<Eigen::Index>(i)).transpose(), k_lle,
                                 proteins.row_ids()[i]);
  });
  return out;
}

void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionResult>& results) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  const Eigen::Index p = results.empty() ? 0 : results.front().predicted.size();
  const std::size_t k = results.empty() ? 0 : results.front().weights.neighbor_ids.size();
  out << "query_id";
  for (Eigen::Index j = 1; j <= p; ++j) out << ",cv" << j;
  for (std::size_t j = 1; j <= k; ++j) out << ",neighbor" << j;
  for (std::size_t j = 1; j <= k; ++j) out << ",weight" << j;
  out << '\n';
  for (const auto& r : results) {
    out << csv::escape(r.query_id);
    for (Eigen::Index j = 0; j < p; ++j) out << ',' << csv::format_double(r.predicted(j));
    for (const auto& id : r.weights.neighbor_ids) out << ',' << csv::escape(id);
    for (Eigen::Index j = 0; j < r.weights.beta.size(); ++j) out << ',' << csv::format_double(r.weights.beta(j));
    out << '\n';
  }
}

}  // namespace canonscreen
