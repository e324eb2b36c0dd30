#include <doctest.h>

#include "canonscreen/cca.hpp"
#include "canonscreen/error.hpp"
#include "canonscreen/evaluation.hpp"
#include "canonscreen/toydata.hpp"
#include "helpers.hpp"

using namespace canonscreen;

TEST_CASE("generators are deterministic in the seed") {
  for (ToyKind kind : {ToyKind::LinearPair, ToyKind::QuadraticPair}) {
    const ToySpec spec{kind, 30, 0.05, 11};
    const PairedDataset a = kind == ToyKind::LinearPair ? gen_toy_linear(spec) : gen_toy_quadratic(spec);
    const PairedDataset b = kind == ToyKind::LinearPair ? gen_toy_linear(spec) : gen_toy_quadratic(spec);
    CHECK(a.proteins().values() == b.proteins().values());
    CHECK(a.ligands().values() == b.ligands().values());
    CHECK(a.ids()[0] == "p001");
    CHECK(a.proteins().column_names() == std::vector<std::string>{"x1", "x2"});
  }
  const ToySpec spec{ToyKind::LinearPair, 30, 0.05, 11};
  ToySpec other = spec;
  other.seed = 12;
  CHECK(gen_toy_linear(spec).proteins().values() != gen_toy_linear(other).proteins().values());
}

TEST_CASE("ToySpec validation") {
  CHECK_THROWS_AS(ToySpec({ToyKind::LinearPair, 3, 0.05, 0}).validate(), Error);
  CHECK_THROWS_AS(ToySpec({ToyKind::SmileyCluster, 61, 0.05, 0}).validate(), Error);
  CHECK_THROWS_AS(ToySpec({ToyKind::LinearPair, 10, -1.0, 0}).validate(), Error);
  CHECK(parse_toy_kind("smiley") == ToyKind::SmileyCluster);
}

TEST_CASE("degree-2 feature map") {
  const DescriptorMatrix x = DescriptorMatrix::from_values((Eigen::MatrixXd(2, 2) << 1, 2, -3, 0.5).finished());
  const DescriptorMatrix f = feature_map_degree2(x);
  REQUIRE(f.cols() == 3);
  CHECK(f.values()(0, 0) == 1.0);
  CHECK(f.values()(0, 1) == 4.0);
  CHECK(f.values()(0, 2) == 2.0);
  CHECK(f.values()(1, 2) == -1.5);
  CHECK(f.column_names()[2] == "c1*c2");
}

TEST_CASE("linear toy is strongly linearly correlated") {
  SolverOptions o;
  o.kappa = 0.0;
  o.p = 2;
  const CanonicalModel m = fit_linear_cca(gen_toy_linear({ToyKind::LinearPair, 60, 0.05, 1}), o);
  CHECK(m.correlations(0) >= 0.95);
  CHECK(m.correlations(1) >= 0.95);
}

TEST_CASE("smiley groups") {
  const LabeledDataset s = gen_smiley_cluster({ToyKind::SmileyCluster, 120, 0.002, 4});
  std::vector<int> count(7, 0);
  for (int g : s.labels) ++count.at(static_cast<std::size_t>(g));
  for (int g = 1; g <= 6; ++g) CHECK(count[static_cast<std::size_t>(g)] == 20);

  // each side on its own only resolves its marginal clusters
  std::vector<int> ligand_truth;
  for (int g : s.labels) ligand_truth.push_back((g - 1) % 2);
  const auto x = kmeans(s.data.proteins().values(), 6, 1);
  const auto y = kmeans(s.data.ligands().values(), 6, 1);
  CHECK(adjusted_rand_index(s.labels, x) < 0.9);
  CHECK(adjusted_rand_index(s.labels, y) < 0.9);
  CHECK(adjusted_rand_index(ligand_truth, kmeans(s.data.ligands().values(), 2, 1)) > 0.9);
}

TEST_CASE("linear toy correlation bands") {
  SolverOptions o;
  o.kappa = 0.0;
  o.p = 2;
  const CanonicalModel exact = fit_linear_cca(gen_toy_linear({ToyKind::LinearPair, 50, 0.0, 3}), o);
  CHECK(std::abs(exact.correlations(0) - 1.0) < 1e-10);
  CHECK(std::abs(exact.correlations(1) - 1.0) < 1e-10);
  const CanonicalModel noisy = fit_linear_cca(gen_toy_linear({ToyKind::LinearPair, 200, 0.1, 3}), o);
  CHECK(noisy.correlations(0) >= 0.95);
  CHECK(noisy.correlations(0) <= 1.0);
}

TEST_CASE("degree-2 feature Gram equals the direct polynomial") {
  Rng rng(8);
  const Eigen::MatrixXd x = testing::gaussian(rng, 6, 2);
  const Eigen::MatrixXd f = feature_map_degree2(DescriptorMatrix::from_values(x)).values();
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) {
      const double direct = x(i, 0) * x(i, 0) * x(j, 0) * x(j, 0) + x(i, 1) * x(i, 1) * x(j, 1) * x(j, 1) +
                            x(i, 0) * x(i, 1) * x(j, 0) * x(j, 1);
      CHECK(std::abs(f.row(i).dot(f.row(j)) - direct) < 1e-12);
    }
}

TEST_CASE("quadratic toy has no linear signal") {
  SolverOptions o;
  o.kappa = 0.0;
  o.p = 2;
  const CanonicalModel m = fit_linear_cca(gen_toy_quadratic({ToyKind::QuadraticPair, 60, 0.05, 1}), o);
  CHECK(m.correlations(0) <= 0.9);
}
