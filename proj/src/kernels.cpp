#include "canonscreen/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "canonscreen/csv.hpp"
#include "canonscreen/error.hpp"

namespace canonscreen {

std::string_view kernel_family_name(KernelFamily family) noexcept {
  switch (family) {
    case KernelFamily::Linear: return "linear";
    case KernelFamily::Rbf: return "rbf";
    case KernelFamily::Ngl: return "ngl";
  }
  return "linear";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "linear") return KernelFamily::Linear;
  if (name == "rbf") return KernelFamily::Rbf;
  if (name == "ngl") return KernelFamily::Ngl;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "'");
}

std::string_view psd_status_name(PsdStatus status) noexcept {
  switch (status) {
    case PsdStatus::Psd: return "psd";
    case PsdStatus::Indefinite: return "indefinite";
    case PsdStatus::Unknown: return "unknown";
  }
  return "unknown";
}

void KernelSpec::validate() const {
  if (family == KernelFamily::Rbf && !(sigma > 0.0 && std::isfinite(sigma)))
    throw Error(ErrorCode::InvalidArgument, "rbf sigma must be positive, got " + csv::format_double(sigma));
  if (family == KernelFamily::Ngl && k < 1)
    throw Error(ErrorCode::InvalidArgument, "ngl k must be at least 1, got " + std::to_string(k));
}

Eigen::MatrixXd KreinDecomposition::reassemble() const {
  const Eigen::Index n = std::max(positive_vectors.rows(), negative_vectors.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  if (p() > 0) out += positive_vectors * positive_values.asDiagonal() * positive_vectors.transpose();
  if (q() > 0) out += negative_vectors * negative_values.asDiagonal() * negative_vectors.transpose();
  return out;
}

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
  return d;
}

namespace {

struct Neighbor {
  double distance;
  Eigen::Index index;
};

// k nearest entries of `distances`, skipping `exclude`, ordered by
// (distance, index).
std::vector<Neighbor> nearest(const Eigen::VectorXd& distances, int k, Eigen::Index exclude) {
  std::vector<Neighbor> all;
  all.reserve(static_cast<std::size_t>(distances.size()));
  for (Eigen::Index j = 0; j < distances.size(); ++j)
    if (j != exclude) all.push_back({distances(j), j});
  const auto kk = static_cast<std::size_t>(k);
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk), all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
                    });
  all.resize(kk);
  return all;
}

double affinity(double distance, double r_i, double r_j, bool literal) {
  const double s2 = r_i * r_j;
  const double d2 = distance * distance;
  return literal ? std::exp(-d2 / (2.0 * std::sqrt(s2))) : std::exp(-d2 / (2.0 * s2));
}

}  // namespace

NeighborhoodGraph knn_graph(const DescriptorMatrix& x, int k) {
  const Eigen::Index n = x.rows();
  if (k < 1 || k > n - 1)
    throw Error(ErrorCode::InvalidArgument,
                "neighborhood size k=" + std::to_string(k) + " needs 1 <= k <= n-1 with n=" + std::to_string(n));
  const Eigen::MatrixXd d = pairwise_distances(x.values());
  NeighborhoodGraph g;
  g.k = k;
  g.adjacency.setConstant(n, n, false);
  g.kth_neighbor_distance.resize(n);
  std::string degenerate;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto nn = nearest(d.col(i), k, i);
    for (const auto& nb : nn) {
      g.adjacency(i, nb.index) = true;
      g.adjacency(nb.index, i) = true;
    }
    g.kth_neighbor_distance(i) = nn.back().distance;
    if (!(nn.back().distance > 0.0)) degenerate += " " + x.row_ids()[static_cast<std::size_t>(i)];
  }
  if (!degenerate.empty())
    throw Error(ErrorCode::DegenerateBandwidth, "k-th neighbor distance is zero for:" + degenerate);
  g.degree = Eigen::VectorXd::Zero(n);
  return g;
}

PsdStatus classify_psd(const Eigen::MatrixXd& values, double* min_eigenvalue) {
  if (!values.allFinite()) throw Error(ErrorCode::EigenFailure, "matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(values, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (min_eigenvalue) *min_eigenvalue = lo;
  return lo >= -kPsdTolerance * std::max(hi, 0.0) ? PsdStatus::Psd : PsdStatus::Indefinite;
}

NglResult ngl_weights(const DescriptorMatrix& x, int k, bool literal_bandwidth) {
  NeighborhoodGraph g = knn_graph(x, k);
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd d = pairwise_distances(x.values());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (g.adjacency(i, j))
        a(i, j) = a(j, i) =
            affinity(d(i, j), g.kth_neighbor_distance(i), g.kth_neighbor_distance(j), literal_bandwidth);
  g.degree = a.rowwise().sum();
  std::string isolated;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(g.degree(i) > 0.0)) isolated += " " + x.row_ids()[static_cast<std::size_t>(i)];
  if (!isolated.empty()) throw Error(ErrorCode::IsolatedVertex, "zero affinity degree for:" + isolated);

  const Eigen::VectorXd root = g.degree.cwiseSqrt();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (a(i, j) != 0.0) w(i, j) = w(j, i) = a(i, j) / (root(i) * root(j));

  KernelMatrix km;
  double floor = 0.0;
  km.psd_status = classify_psd(w, &floor);
  km.eigen_floor = floor;
  km.values = std::move(w);
  return NglResult{std::move(km), std::move(g)};
}

KernelMatrix gram(const KernelSpec& spec, const DescriptorMatrix& x, NeighborhoodGraph* graph) {
  spec.validate();
  const auto& v = x.values();
  const Eigen::Index n = v.rows();
  KernelMatrix km;
  switch (spec.family) {
    case KernelFamily::Linear: {
      Eigen::MatrixXd lower = Eigen::MatrixXd::Zero(n, n);
      lower.selfadjointView<Eigen::Lower>().rankUpdate(v);
      km.values = lower.selfadjointView<Eigen::Lower>();
      km.psd_status = PsdStatus::Psd;
      break;
    }
    case KernelFamily::Rbf: {
      const double denom = 2.0 * spec.sigma * spec.sigma;
      km.values.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        km.values(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j)
          km.values(i, j) = km.values(j, i) = std::exp(-(v.row(i) - v.row(j)).squaredNorm() / denom);
      }
      km.psd_status = PsdStatus::Psd;
      break;
    }
    case KernelFamily::Ngl: {
      auto result = ngl_weights(x, spec.k, spec.literal_bandwidth);
      if (graph) *graph = std::move(result.graph);
      return std::move(result.weights);
    }
  }
  return km;
}

KernelMatrix center_kernel(const KernelMatrix& k) {
  const Eigen::Index n = k.values.rows();
  const Eigen::VectorXd m = k.values.colwise().mean().transpose();
  const double g = m.mean();
  KernelMatrix out;
  out.values.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out.values(i, j) = k.values(i, j) - (m(i) + m(j)) + g;
  out.centered = true;
  // double centering is a congruence, so definiteness is preserved only for PSD input
  out.psd_status = k.psd_status == PsdStatus::Psd ? PsdStatus::Psd : PsdStatus::Unknown;
  return out;
}

KernelCenterer KernelCenterer::from(const Eigen::MatrixXd& uncentered_gram) {
  KernelCenterer c;
  c.column_means = uncentered_gram.colwise().mean().transpose();
  c.grand_mean = c.column_means.mean();
  return c;
}

Eigen::VectorXd KernelCenterer::center(const Eigen::VectorXd& k_new) const {
  if (k_new.size() != column_means.size())
    throw Error(ErrorCode::DimensionMismatch, "kernel vector has " + std::to_string(k_new.size()) +
                                                  " entries, expected " + std::to_string(column_means.size()));
  const double own = k_new.mean();
  Eigen::VectorXd out(k_new.size());
  for (Eigen::Index i = 0; i < k_new.size(); ++i) out(i) = k_new(i) - (own + column_means(i)) + grand_mean;
  return out;
}

Eigen::VectorXd center_kernel_vector(const Eigen::VectorXd& k_new, const KernelMatrix& train_uncentered) {
  return KernelCenterer::from(train_uncentered.values).center(k_new);
}

KreinDecomposition krein_decompose(const KernelMatrix& k) {
  if (!k.values.allFinite()) throw Error(ErrorCode::EigenFailure, "kernel matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.values);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Eigen::Index n = lambda.size();
  const double tol = kZeroEigenTolerance * lambda.cwiseAbs().maxCoeff();
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index i = n - 1; i >= 0; --i)
    if (lambda(i) > tol) pos.push_back(i);
  for (Eigen::Index i = 0; i < n; ++i)
    if (lambda(i) < -tol) neg.push_back(i);
  KreinDecomposition dec;
  auto take = [&](const std::vector<Eigen::Index>& idx, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    values.resize(static_cast<Eigen::Index>(idx.size()));
    vectors.resize(n, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
      values(static_cast<Eigen::Index>(c)) = lambda(idx[c]);
      vectors.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(idx[c]);
    }
  };
  take(pos, dec.positive_values, dec.positive_vectors);
  take(neg, dec.negative_values, dec.negative_vectors);
  dec.zero_count = n - dec.p() - dec.q();
  return dec;
}

KernelMatrix positive_part(const KernelMatrix& k0) {
  if (!k0.values.allFinite()) throw Error(ErrorCode::EigenFailure, "kernel matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k0.values);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "symmetric eigensolver did not converge");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const double tol = kZeroEigenTolerance * lambda.cwiseAbs().maxCoeff();

  KernelMatrix out;
  out.centered = k0.centered;
  out.psd_status = PsdStatus::Psd;
  if (lambda.minCoeff() >= -tol) {
    // nothing to clip beyond the zero threshold: already PSD
    out.values = k0.values;
    out.eigen_floor = lambda.minCoeff();
    return out;
  }
  const Eigen::VectorXd clipped = lambda.cwiseMax(0.0);
  Eigen::MatrixXd r = es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose();
  out.values = 0.5 * (r + r.transpose());
  out.eigen_floor = 0.0;
  return out;
}

Eigen::VectorXd kernel_vector(const KernelSpec& spec, const DescriptorMatrix& x_train,
                              const NeighborhoodGraph* graph, const Eigen::VectorXd& x_new) {
  return kernel_vector(spec, x_train.values(), graph, x_new);
}

Eigen::VectorXd kernel_vector(const KernelSpec& spec, const Eigen::MatrixXd& v,
                              const NeighborhoodGraph* graph, const Eigen::VectorXd& x_new) {
  spec.validate();
  if (x_new.size() != v.cols())
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(x_new.size()) +
                                                  " descriptors, expected " + std::to_string(v.cols()));
  const Eigen::Index n = v.rows();
  Eigen::VectorXd out(n);
  switch (spec.family) {
    case KernelFamily::Linear:
      out = v * x_new;
      break;
    case KernelFamily::Rbf: {
      const double denom = 2.0 * spec.sigma * spec.sigma;
      for (Eigen::Index j = 0; j < n; ++j) out(j) = std::exp(-(v.row(j).transpose() - x_new).squaredNorm() / denom);
      break;
    }
    case KernelFamily::Ngl: {
      if (!graph || graph->kth_neighbor_distance.size() != n || graph->k != spec.k)
        throw Error(ErrorCode::InvalidArgument, "ngl kernel vector needs the training neighborhood graph");
      if (spec.k > n) throw Error(ErrorCode::InvalidArgument, "ngl k exceeds the training size");
      Eigen::VectorXd dist(n);
      for (Eigen::Index j = 0; j < n; ++j) dist(j) = (v.row(j).transpose() - x_new).norm();
      const auto nn = nearest(dist, spec.k, -1);
      const double r_new = nn.back().distance;
      if (!(r_new > 0.0))
        throw Error(ErrorCode::DegenerateBandwidth, "query coincides with its k-th training neighbor");
      out.setZero();
      double total = 0.0;
      for (const auto& nb : nn) {
        const double a = affinity(nb.distance, r_new, graph->kth_neighbor_distance(nb.index), spec.literal_bandwidth);
        out(nb.index) = a;
        total += a;
      }
      if (!(total > 0.0)) throw Error(ErrorCode::IsolatedVertex, "query has zero affinity to its neighbors");
      const double root_total = std::sqrt(total);
      for (const auto& nb : nn) out(nb.index) /= root_total * std::sqrt(graph->degree(nb.index));
      break;
    }
  }
  return out;
}

void write_kernel_csv(const std::filesystem::path& path, const KernelMatrix& k,
                      const std::vector<std::string>& row_ids) {
  if (static_cast<Eigen::Index>(row_ids.size()) != k.values.rows())
    throw Error(ErrorCode::DimensionMismatch, "row id count does not match kernel size");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << "id";
  for (const auto& id : row_ids) out << ',' << csv::escape(id);
  out << '\n';
  for (Eigen::Index i = 0; i < k.values.rows(); ++i) {
    out << csv::escape(row_ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < k.values.cols(); ++j) out << ',' << csv::format_double(k.values(i, j));
    out << '\n';
  }
}

}  // namespace canonscreen
