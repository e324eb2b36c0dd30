#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "canonscreen/data.hpp"

namespace canonscreen {

enum class ToyKind { LinearPair, QuadraticPair, SmileyCluster };

std::string_view toy_kind_name(ToyKind kind) noexcept;
/// Accepts "linear", "quadratic", "smiley".
ToyKind parse_toy_kind(std::string_view name);

struct ToySpec {
  ToyKind kind = ToyKind::LinearPair;
  int n = 60;
  double noise_sd = 0.05;
  std::uint64_t seed = 0;

  /// Noise level used when none is given on the command line.
  static double default_noise(ToyKind kind) noexcept;
  /// n >= 4, noise_sd >= 0, and n divisible by 6 for SmileyCluster.
  void validate() const;
};

/// X uniform on [-1,1]^2, Y = X Q + noise with Q a random rotation times a
/// random axis scaling.
PairedDataset gen_toy_linear(const ToySpec& spec);

/// Latent z uniform on [-1,1]^2; X = z + noise, Y = s R |z| + noise with R a
/// fixed rotation times scaling and s a random sign per pair. The relation
/// is even in each coordinate and in Y, so no linear direction of X
/// correlates with Y and protein-space neighbors need not be ligand-space
/// neighbors, while quadratic features of both sides share (z1^2, z2^2).
PairedDataset gen_toy_quadratic(const ToySpec& spec);

struct LabeledDataset {
  PairedDataset data;
  std::vector<int> labels;  // joint group, 1..6
};

/// Six joint groups of n/6 pairs. Protein side: two eyes and a mouth, each
/// split into two thin parallel strips (arc halves for the mouth). Ligand
/// side: two clusters, each split into three thin strips. Group
/// g = 2 * protein_cluster + ligand_cluster + 1. noise_sd is the strip
/// thickness.
LabeledDataset gen_smiley_cluster(const ToySpec& spec);

/// (x1^2, x2^2, x1 x2) per row; requires two columns.
DescriptorMatrix feature_map_degree2(const DescriptorMatrix& x);

}  // namespace canonscreen
