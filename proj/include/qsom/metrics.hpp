#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsom/som.hpp"

namespace qsom {

/// Per-sample true label and BMU. Labels are carried for evaluation only.
struct LabeledAssignment {
  std::vector<int> labels;
  std::vector<std::size_t> bmus;

  void validate(std::size_t grid_size) const;
};

/// Pair-counting similarity of two partitions, TP / sqrt((TP+FP)(TP+FN)).
/// Returns 0 when either partition has no same-cluster pair.
double fowlkes_mallows(std::span<const int> labels_a, std::span<const int> labels_b);

using PointSet = std::vector<std::vector<double>>;

double silhouette(const PointSet& points, std::span<const int> labels);
double davies_bouldin(const PointSet& points, std::span<const int> labels);
/// Returns 1 when every cluster has zero scatter (the ratio is undefined).
double calinski_harabasz(const PointSet& points, std::span<const int> labels);

/// Mean Euclidean distance to the BMU.
double quantization_error(const SomGrid& grid, std::span<const std::vector<double>> data);
/// Mean Hilbert-Schmidt distance sqrt(2 - 2K) to the BMU.
double quantization_error(const SomGrid& grid, KernelEstimator& est,
                          std::span<const DataSample> data);

enum class Adjacency { kEight, kFour };

bool grid_adjacent(const SomGrid& grid, std::size_t i, std::size_t j,
                   Adjacency adjacency = Adjacency::kEight);

/// Fraction of samples whose best and second-best units are not adjacent.
double topographic_error(const SomGrid& grid, std::span<const std::vector<double>> data,
                         Adjacency adjacency = Adjacency::kEight);
double topographic_error(const SomGrid& grid, KernelEstimator& est,
                         std::span<const DataSample> data,
                         Adjacency adjacency = Adjacency::kEight);

/// Majority label per occupied neuron (ties to the smaller label), mapped back
/// onto the samples.
std::vector<int> majority_labels(const LabeledAssignment& assignment);

/// Fraction of samples agreeing with their neuron's majority label.
double map_purity(const LabeledAssignment& assignment);

/// BMU grid coordinates as points, for the map-space cluster indices.
PointSet grid_points(const SomGrid& grid, std::span<const std::size_t> bmus);

}  // namespace qsom
