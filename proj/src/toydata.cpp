#include "canonscreen/toydata.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "canonscreen/error.hpp"
#include "canonscreen/rng.hpp"

namespace canonscreen {

namespace {

std::vector<std::string> pair_ids(int n) {
  const std::size_t width = std::max<std::size_t>(3, std::to_string(n).size());
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    std::string digits = std::to_string(i);
    ids.push_back("p" + std::string(width - digits.size(), '0') + digits);
  }
  return ids;
}

PairedDataset assemble(Eigen::MatrixXd x, Eigen::MatrixXd y) {
  const auto ids = pair_ids(static_cast<int>(x.rows()));
  std::vector<std::string> xc, yc;
  for (Eigen::Index j = 1; j <= x.cols(); ++j) xc.push_back("x" + std::to_string(j));
  for (Eigen::Index j = 1; j <= y.cols(); ++j) yc.push_back("y" + std::to_string(j));
  return PairedDataset(DescriptorMatrix(std::move(x), xc, ids), DescriptorMatrix(std::move(y), yc, ids));
}

Eigen::Matrix2d rotation(double angle) {
  Eigen::Matrix2d r;
  r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return r;
}

void check_kind(const ToySpec& spec, ToyKind want) {
  spec.validate();
  if (spec.kind != want)
    throw Error(ErrorCode::InvalidArgument, "generator expects kind " + std::string(toy_kind_name(want)));
}

// Smiley geometry.
constexpr double kStripLength = 0.12;
constexpr double kStripGap = 0.03;
constexpr double kMouthRadius = 1.4;
constexpr double kMouthRadialSd = 0.05;
constexpr double kMouthCenterY = 0.6;

}  // namespace

std::string_view toy_kind_name(ToyKind kind) noexcept {
  switch (kind) {
    case ToyKind::LinearPair: return "linear";
    case ToyKind::QuadraticPair: return "quadratic";
    case ToyKind::SmileyCluster: return "smiley";
  }
  return "linear";
}

ToyKind parse_toy_kind(std::string_view name) {
  if (name == "linear") return ToyKind::LinearPair;
  if (name == "quadratic") return ToyKind::QuadraticPair;
  if (name == "smiley") return ToyKind::SmileyCluster;
  throw Error(ErrorCode::InvalidArgument, "unknown toy kind '" + std::string(name) + "'");
}

double ToySpec::default_noise(ToyKind kind) noexcept {
  return kind == ToyKind::SmileyCluster ? 0.002 : 0.05;
}

void ToySpec::validate() const {
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "toy n must be at least 4, got " + std::to_string(n));
  if (!(noise_sd >= 0.0 && std::isfinite(noise_sd)))
    throw Error(ErrorCode::InvalidArgument, "noise_sd must be finite and nonnegative");
  if (kind == ToyKind::SmileyCluster && n % 6 != 0)
    throw Error(ErrorCode::InvalidArgument, "smiley n must be divisible by 6, got " + std::to_string(n));
}

PairedDataset gen_toy_linear(const ToySpec& spec) {
  check_kind(spec, ToyKind::LinearPair);
  Rng rng(spec.seed);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double s1 = rng.uniform(0.5, 2.0), s2 = rng.uniform(0.5, 2.0);
  const Eigen::Matrix2d q = rotation(angle) * Eigen::Vector2d(s1, s2).asDiagonal();
  Eigen::MatrixXd x(spec.n, 2), y(spec.n, 2);
  for (int i = 0; i < spec.n; ++i) {
    x(i, 0) = rng.uniform(-1.0, 1.0);
    x(i, 1) = rng.uniform(-1.0, 1.0);
  }
  y = x * q;
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < 2; ++j) y(i, j) += spec.noise_sd * rng.normal();
  return assemble(std::move(x), std::move(y));
}

PairedDataset gen_toy_quadratic(const ToySpec& spec) {
  check_kind(spec, ToyKind::QuadraticPair);
  Rng rng(spec.seed);
  const Eigen::Matrix2d r = rotation(0.6) * Eigen::Vector2d(1.0, 0.6).asDiagonal();
  Eigen::MatrixXd x(spec.n, 2), y(spec.n, 2);
  for (int i = 0; i < spec.n; ++i) {
    const Eigen::Vector2d z(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    // only the squared features are tied across sides, so the sign of Y is free
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const Eigen::Vector2d image = sign * (r * z.cwiseAbs());
    for (int j = 0; j < 2; ++j) {
      x(i, j) = z(j) + spec.noise_sd * rng.normal();
      y(i, j) = image(j) + spec.noise_sd * rng.normal();
    }
  }
  return assemble(std::move(x), std::move(y));
}

LabeledDataset gen_smiley_cluster(const ToySpec& spec) {
  check_kind(spec, ToyKind::SmileyCluster);
  Rng rng(spec.seed);
  const int per_group = spec.n / 6;
  const double thickness = spec.noise_sd;
  const double deg = std::numbers::pi / 180.0;
  Eigen::MatrixXd x(spec.n, 2), y(spec.n, 2);
  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    const int group = i / per_group;
    const int a = group / 2;  // protein cluster: left eye, right eye, mouth
    const int b = group % 2;  // ligand cluster
    labels[static_cast<std::size_t>(i)] = group + 1;
    if (a < 2) {
      const double cx = a == 0 ? -1.0 : 1.0;
      x(i, 0) = cx + kStripLength * (rng.uniform() - 0.5);
      x(i, 1) = 1.0 + (b - 0.5) * kStripGap + thickness * rng.normal();
    } else {
      const double t = b == 0 ? rng.uniform(200.0, 262.0) * deg : rng.uniform(278.0, 340.0) * deg;
      const double radius = kMouthRadius + kMouthRadialSd * rng.normal();
      x(i, 0) = radius * std::cos(t);
      x(i, 1) = kMouthCenterY + radius * std::sin(t);
    }
    const double center = b == 0 ? -1.5 : 1.5;
    y(i, 0) = center + kStripLength * (rng.uniform() - 0.5);
    y(i, 1) = center + (a - 1) * kStripGap + thickness * rng.normal();
  }
  return {assemble(std::move(x), std::move(y)), std::move(labels)};
}

DescriptorMatrix feature_map_degree2(const DescriptorMatrix& x) {
  if (x.cols() != 2)
    throw Error(ErrorCode::DimensionMismatch, "degree-2 feature map needs 2 columns, got " + std::to_string(x.cols()));
  const auto& v = x.values();
  Eigen::MatrixXd out(v.rows(), 3);
  out.col(0) = v.col(0).array().square();
  out.col(1) = v.col(1).array().square();
  out.col(2) = v.col(0).cwiseProduct(v.col(1));
  const auto& names = x.column_names();
  return DescriptorMatrix(std::move(out), {names[0] + "^2", names[1] + "^2", names[0] + "*" + names[1]}, x.row_ids());
}

}  // namespace canonscreen
