#include "canonscreen/cca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "canonscreen/csv.hpp"
#include "canonscreen/error.hpp"

namespace canonscreen {

std::string_view method_name(Method method) noexcept {
  switch (method) {
    case Method::Cca: return "cca";
    case Method::Kcca: return "kcca";
    case Method::Ikcca: return "ikcca";
  }
  return "cca";
}

Method parse_method(std::string_view name) {
  if (name == "cca") return Method::Cca;
  if (name == "kcca") return Method::Kcca;
  if (name == "ikcca") return Method::Ikcca;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) + "'");
}

std::string_view projection_mode_name(ProjectionMode mode) noexcept {
  return mode == ProjectionMode::Clipped ? "clipped" : "indefinite";
}

ProjectionMode parse_projection_mode(std::string_view name) {
  if (name == "indefinite") return ProjectionMode::Indefinite;
  if (name == "clipped") return ProjectionMode::Clipped;
  throw Error(ErrorCode::InvalidArgument, "unknown projection mode '" + std::string(name) + "'");
}

void SolverOptions::validate() const {
  if (!(kappa >= 0.0 && std::isfinite(kappa)))
    throw Error(ErrorCode::InvalidArgument, "kappa must be a finite nonnegative number, got " + csv::format_double(kappa));
  if (p < 1) throw Error(ErrorCode::InvalidArgument, "p must be at least 1, got " + std::to_string(p));
  if (!(jitter >= 0.0 && std::isfinite(jitter)))
    throw Error(ErrorCode::InvalidArgument, "jitter must be a finite nonnegative number");
}

CanonicalModel CanonicalModel::truncated(int keep) const {
  if (keep < 1 || keep > p)
    throw Error(ErrorCode::InvalidArgument,
                "cannot keep " + std::to_string(keep) + " of " + std::to_string(p) + " directions");
  CanonicalModel out = *this;
  out.requested_p = keep;
  out.p = keep;
  out.rank_deficient = false;
  out.correlations = correlations.head(keep);
  for (SideModel* s : {&out.protein, &out.ligand}) {
    s->directions = s->directions.leftCols(keep).eval();
    s->variates = s->variates.leftCols(keep).eval();
  }
  return out;
}

namespace {

// Pseudo-inverse square root of a constraint matrix with eigenvectors `v`
// and eigenvalues `b`; `extra` multiplies each retained factor (used to fold
// the Gram into the whitening on the kernel route).
struct Whitening {
  Eigen::MatrixXd inv_sqrt;  // B^{-1/2}
  Eigen::MatrixXd applied;   // B^{-1/2} S for the kernel route, unused otherwise
  Eigen::Index rank = 0;
};

Whitening whiten_linear(const Eigen::MatrixXd& s, double kappa, double jitter) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "covariance eigensolver did not converge");
  const Eigen::VectorXd b = es.eigenvalues().array() + kappa;
  const double floor = jitter * b.maxCoeff();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(b.size());
  Whitening w;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b(i) > floor && b(i) > 0.0) {
      g(i) = 1.0 / std::sqrt(b(i));
      ++w.rank;
    }
  w.inv_sqrt = es.eigenvectors() * g.asDiagonal() * es.eigenvectors().transpose();
  return w;
}

// B = Kc^2 + kappa I shares the eigenvectors of Kc, so B^{-1/2} Kc is
// formed from the eigenvalues of Kc directly.
Whitening whiten_kernel(const Eigen::MatrixXd& kc, double kappa, double jitter) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kc);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Gram eigensolver did not converge");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Eigen::VectorXd b = lambda.array().square() + kappa;
  const double floor = jitter * b.maxCoeff();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd f = Eigen::VectorXd::Zero(b.size());
  Whitening w;
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (b(i) > floor && b(i) > 0.0) {
      g(i) = 1.0 / std::sqrt(b(i));
      f(i) = lambda(i) * g(i);
      ++w.rank;
    }
  const auto& v = es.eigenvectors();
  w.inv_sqrt = v * g.asDiagonal() * v.transpose();
  w.applied = v * f.asDiagonal() * v.transpose();
  return w;
}

struct Solution {
  Eigen::MatrixXd dir_x, dir_y;
  Eigen::VectorXd rho;
  int achieved = 0;
};

Solution solve_whitened(const Eigen::MatrixXd& m, const Eigen::MatrixXd& gx, const Eigen::MatrixXd& gy, int p) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const int avail = static_cast<int>(std::min<Eigen::Index>(p, s.size()));
  int achieved = 0;
  while (achieved < avail && s(achieved) > kMinCorrelation) ++achieved;
  Solution out;
  out.achieved = achieved;
  out.rho = s.head(achieved).cwiseMax(0.0).cwiseMin(1.0);
  out.dir_x = gx * svd.matrixU().leftCols(achieved);
  out.dir_y = gy * svd.matrixV().leftCols(achieved);
  return out;
}

// Flips each pair so the protein variate's largest-magnitude entry is positive.
void fix_signs(SideModel& protein, SideModel& ligand) {
  for (Eigen::Index j = 0; j < protein.variates.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < protein.variates.rows(); ++i) {
      const double a = std::abs(protein.variates(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (protein.variates(arg, j) < 0.0)
      for (SideModel* s : {&protein, &ligand}) {
        s->directions.col(j) *= -1.0;
        s->variates.col(j) *= -1.0;
      }
  }
}

CanonicalModel start_model(Method method, const CenteredData& cd, const SolverOptions& opts) {
  CanonicalModel m;
  m.method = method;
  m.projection = opts.projection;
  m.kappa = opts.kappa;
  m.jitter = opts.jitter;
  m.standardize = opts.standardize;
  m.requested_p = opts.p;
  m.centering = cd.record;
  m.training_ids = cd.data.ids();
  m.protein.column_names = cd.data.proteins().column_names();
  m.ligand.column_names = cd.data.ligands().column_names();
  m.protein.training = cd.data.proteins().values();
  m.ligand.training = cd.data.ligands().values();
  return m;
}

void finish_model(CanonicalModel& m, Solution&& sol, const Eigen::MatrixXd& basis_x, const Eigen::MatrixXd& basis_y) {
  if (sol.achieved == 0)
    throw Error(ErrorCode::SingularConstraint, "no canonical direction with nonzero correlation");
  m.p = sol.achieved;
  m.rank_deficient = m.p < m.requested_p;
  m.correlations = std::move(sol.rho);
  m.protein.directions = std::move(sol.dir_x);
  m.ligand.directions = std::move(sol.dir_y);
  m.protein.variates = basis_x * m.protein.directions;
  m.ligand.variates = basis_y * m.ligand.directions;
  fix_signs(m.protein, m.ligand);
}

Eigen::MatrixXd positive_projector(const Eigen::MatrixXd& k0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k0);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Gram eigensolver did not converge");
  const Eigen::VectorXd& lambda = es.eigenvalues();
  if (lambda.minCoeff() >= -kZeroEigenTolerance * lambda.cwiseAbs().maxCoeff()) return {};  // identity
  Eigen::VectorXd keep = (lambda.array() > 0.0).cast<double>();
  return es.eigenvectors() * keep.asDiagonal() * es.eigenvectors().transpose();
}

CanonicalModel fit_kernel(Method method, const PairedDataset& data, const KernelSpec& kx, const KernelSpec& ky,
                          const SolverOptions& opts) {
  opts.validate();
  kx.validate();
  ky.validate();
  const CenteredData cd = center_and_scale(data, opts.standardize);
  CanonicalModel m = start_model(method, cd, opts);

  Eigen::MatrixXd centered[2];
  SideModel* sides[2] = {&m.protein, &m.ligand};
  const KernelSpec* specs[2] = {&kx, &ky};
  const DescriptorMatrix* inputs[2] = {&cd.data.proteins(), &cd.data.ligands()};
  for (int s = 0; s < 2; ++s) {
    SideModel& side = *sides[s];
    side.spec = *specs[s];
    NeighborhoodGraph graph;
    KernelMatrix k = gram(side.spec, *inputs[s], &graph);
    if (side.spec.family == KernelFamily::Ngl) side.graph = std::move(graph);
    if (method == Method::Ikcca) {
      side.clip_projector = positive_projector(k.values);
      KernelMatrix plus = positive_part(k);
      side.indefinite_gram = std::move(k.values);
      k = std::move(plus);
    }
    side.gram = k.values;
    centered[s] = center_kernel(k).values;
  }

  const Whitening wx = whiten_kernel(centered[0], opts.kappa, opts.jitter);
  const Whitening wy = whiten_kernel(centered[1], opts.kappa, opts.jitter);
  if (wx.rank == 0 || wy.rank == 0)
    throw Error(ErrorCode::SingularConstraint, "centered Gram matrix is zero with kappa = 0");
  Solution sol = solve_whitened(wx.applied * wy.applied, wx.inv_sqrt, wy.inv_sqrt, opts.p);
  finish_model(m, std::move(sol), centered[0], centered[1]);
  return m;
}

// Per-side state for out-of-sample kernelization.
struct KernelProjector {
  const SideModel& side;
  const Eigen::MatrixXd* projector = nullptr;
  KernelCenterer centerer;

  KernelProjector(const CanonicalModel& m, const SideModel& s) : side(s) {
    if (m.method == Method::Ikcca && m.projection == ProjectionMode::Indefinite) {
      centerer = KernelCenterer::from(s.indefinite_gram);
    } else {
      if (m.method == Method::Ikcca && s.clip_projector.size() > 0) projector = &s.clip_projector;
      centerer = KernelCenterer::from(s.gram);
    }
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd k = kernel_vector(side.spec, side.training, side.graph ? &*side.graph : nullptr, x);
    if (projector) k = (*projector) * k;
    return side.directions.transpose() * centerer.center(k);
  }
};

void check_dims(const CanonicalModel& model, Eigen::Index cols, Side side) {
  const Eigen::Index want = model.side(side).training.cols();
  if (cols != want)
    throw Error(ErrorCode::DimensionMismatch, std::string(side_name(side)) + " points have " + std::to_string(cols) +
                                                  " descriptors, model expects " + std::to_string(want));
}

}  // namespace

CanonicalModel fit_linear_cca(const PairedDataset& data, const SolverOptions& opts) {
  opts.validate();
  const CenteredData cd = center_and_scale(data, opts.standardize);
  CanonicalModel m = start_model(Method::Cca, cd, opts);
  const Eigen::MatrixXd& x = m.protein.training;
  const Eigen::MatrixXd& y = m.ligand.training;
  const Eigen::MatrixXd sxx = x.transpose() * x;
  const Eigen::MatrixXd syy = y.transpose() * y;
  const Eigen::MatrixXd sxy = x.transpose() * y;
  const Whitening wx = whiten_linear(sxx, opts.kappa, opts.jitter);
  const Whitening wy = whiten_linear(syy, opts.kappa, opts.jitter);
  if (wx.rank == 0 || wy.rank == 0)
    throw Error(ErrorCode::SingularConstraint, "covariance matrix is zero with kappa = 0");
  Solution sol = solve_whitened(wx.inv_sqrt * sxy * wy.inv_sqrt, wx.inv_sqrt, wy.inv_sqrt, opts.p);
  finish_model(m, std::move(sol), x, y);
  return m;
}

CanonicalModel fit_kcca(const PairedDataset& data, const KernelSpec& protein_kernel,
                        const KernelSpec& ligand_kernel, const SolverOptions& opts) {
  return fit_kernel(Method::Kcca, data, protein_kernel, ligand_kernel, opts);
}

CanonicalModel fit_ikcca(const PairedDataset& data, const KernelSpec& protein_kernel,
                         const KernelSpec& ligand_kernel, const SolverOptions& opts) {
  return fit_kernel(Method::Ikcca, data, protein_kernel, ligand_kernel, opts);
}

CanonicalModel fit(const PairedDataset& data, const FitConfig& config) {
  switch (config.method) {
    case Method::Cca: return fit_linear_cca(data, config.options);
    case Method::Kcca: return fit_kcca(data, config.protein_kernel, config.ligand_kernel, config.options);
    case Method::Ikcca: return fit_ikcca(data, config.protein_kernel, config.ligand_kernel, config.options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

Projection project(const CanonicalModel& model, const DescriptorMatrix& points, Side side) {
  check_dims(model, points.cols(), side);
  const Eigen::MatrixXd processed = apply_centering(model.centering, points, side).values();
  const SideModel& s = model.side(side);
  Projection out;
  out.side = side;
  out.ids = points.row_ids();
  if (!model.is_kernel()) {
    out.coords = processed * s.directions;
  } else {
    const KernelProjector kp(model, s);
    out.coords.resize(processed.rows(), model.p);
    for (Eigen::Index i = 0; i < processed.rows(); ++i) out.coords.row(i) = kp(processed.row(i).transpose()).transpose();
  }
  return out;
}

Eigen::VectorXd project_point(const CanonicalModel& model, const Eigen::VectorXd& x, Side side) {
  check_dims(model, x.size(), side);
  const Eigen::VectorXd processed = apply_centering(model.centering, x, side);
  const SideModel& s = model.side(side);
  if (!model.is_kernel()) return s.directions.transpose() * processed;
  return KernelProjector(model, s)(processed);
}

}  // namespace canonscreen
