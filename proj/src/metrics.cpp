#include "qsom/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "qsom/errors.hpp"

namespace qsom {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double pairs(double n) { return n * (n - 1.0) / 2.0; }

// Groups sample indices by label, in ascending label order.
std::map<int, std::vector<std::size_t>> clusters_of(const PointSet& points,
                                                    std::span<const int> labels) {
  if (points.size() != labels.size()) {
    throw ShapeError("points and labels differ in length");
  }
  if (points.empty()) throw ArgumentError("no points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw ShapeError("points differ in dimension");
  }
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  if (groups.size() < 2) throw ArgumentError("cluster index needs >= 2 clusters");
  return groups;
}

std::vector<double> centroid(const PointSet& points, const std::vector<std::size_t>& members) {
  std::vector<double> c(points.front().size(), 0.0);
  for (std::size_t i : members) {
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += points[i][d];
  }
  for (double& v : c) v /= static_cast<double>(members.size());
  return c;
}

// Indices of the best and second-best units under a "larger is better" score.
std::pair<std::size_t, std::size_t> best_two(std::span<const double> scores) {
  std::size_t best = 0;
  std::size_t second = scores.size() > 1 ? 1 : 0;
  if (scores.size() > 1 && scores[1] > scores[0]) std::swap(best, second);
  for (std::size_t i = 2; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      second = best;
      best = i;
    } else if (scores[i] > scores[second]) {
      second = i;
    }
  }
  return {best, second};
}

}  // namespace

void LabeledAssignment::validate(std::size_t grid_size) const {
  if (labels.size() != bmus.size()) throw ShapeError("labels and bmus differ in length");
  for (std::size_t b : bmus) {
    if (b >= grid_size) throw IndexError("BMU index outside the grid");
  }
}

double fowlkes_mallows(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw ShapeError("labelings differ in length");
  if (a.size() < 2) throw ArgumentError("Fowlkes-Mallows needs >= 2 samples");
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> count_a;
  std::map<int, double> count_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    count_a[a[i]] += 1.0;
    count_b[b[i]] += 1.0;
  }
  double tp = 0.0;
  for (const auto& [key, n] : joint) tp += pairs(n);
  double pa = 0.0;
  for (const auto& [key, n] : count_a) pa += pairs(n);
  double pb = 0.0;
  for (const auto& [key, n] : count_b) pb += pairs(n);
  if (tp == 0.0 || pa == 0.0 || pb == 0.0) return 0.0;
  return tp / std::sqrt(pa * pb);
}

double silhouette(const PointSet& points, std::span<const int> labels) {
  const auto groups = clusters_of(points, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& own = groups.at(labels[i]);
    if (own.size() == 1) continue;  // singleton clusters score 0
    double a = 0.0;
    for (std::size_t j : own) a += distance(points[i], points[j]);
    a /= static_cast<double>(own.size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, members] : groups) {
      if (label == labels[i]) continue;
      double d = 0.0;
      for (std::size_t j : members) d += distance(points[i], points[j]);
      b = std::min(b, d / static_cast<double>(members.size()));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(points.size());
}

double davies_bouldin(const PointSet& points, std::span<const int> labels) {
  const auto groups = clusters_of(points, labels);
  std::vector<std::vector<double>> centers;
  std::vector<double> scatter;
  for (const auto& [label, members] : groups) {
    centers.push_back(centroid(points, members));
    double s = 0.0;
    for (std::size_t i : members) s += distance(points[i], centers.back());
    scatter.push_back(s / static_cast<double>(members.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      if (i == j) continue;
      const double sep = distance(centers[i], centers[j]);
      // Coincident centroids contribute nothing, as in the usual convention.
      if (sep == 0.0) continue;
      worst = std::max(worst, (scatter[i] + scatter[j]) / sep);
    }
    total += worst;
  }
  return total / static_cast<double>(centers.size());
}

double calinski_harabasz(const PointSet& points, std::span<const int> labels) {
  const auto groups = clusters_of(points, labels);
  std::vector<std::size_t> all(points.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::vector<double> mean = centroid(points, all);
  double between = 0.0;
  double within = 0.0;
  for (const auto& [label, members] : groups) {
    const std::vector<double> c = centroid(points, members);
    const double d = distance(c, mean);
    between += static_cast<double>(members.size()) * d * d;
    for (std::size_t i : members) {
      const double e = distance(points[i], c);
      within += e * e;
    }
  }
  if (within == 0.0) return 1.0;
  const double n = static_cast<double>(points.size());
  const double k = static_cast<double>(groups.size());
  return (between / (k - 1.0)) / (within / (n - k));
}

double quantization_error(const SomGrid& grid, std::span<const std::vector<double>> data) {
  if (data.empty()) throw ArgumentError("quantization error of an empty dataset");
  double acc = 0.0;
  for (const auto& x : data) acc += distance(x, grid.weight(find_bmu_euclidean(grid, x)));
  return acc / static_cast<double>(data.size());
}

double quantization_error(const SomGrid& grid, KernelEstimator& est,
                          std::span<const DataSample> data) {
  if (data.empty()) throw ArgumentError("quantization error of an empty dataset");
  double acc = 0.0;
  for (const auto& x : data) {
    acc += fidelity_distance(match_quantum(grid, est, est.prepare(x)).fidelity);
  }
  return acc / static_cast<double>(data.size());
}

bool grid_adjacent(const SomGrid& grid, std::size_t i, std::size_t j, Adjacency adjacency) {
  const auto [ri, ci] = grid.coords(i);
  const auto [rj, cj] = grid.coords(j);
  const std::size_t dr = ri > rj ? ri - rj : rj - ri;
  const std::size_t dc = ci > cj ? ci - cj : cj - ci;
  if (i == j) return false;
  if (adjacency == Adjacency::kFour) return dr + dc == 1;
  return dr <= 1 && dc <= 1;
}

double topographic_error(const SomGrid& grid, std::span<const std::vector<double>> data,
                         Adjacency adjacency) {
  if (grid.size() < 2) throw ArgumentError("topographic error needs >= 2 neurons");
  if (data.empty()) throw ArgumentError("topographic error of an empty dataset");
  std::size_t errors = 0;
  std::vector<double> scores(grid.size());
  for (const auto& x : data) {
    if (x.size() != grid.dim()) throw ShapeError("sample dimension mismatch");
    for (std::size_t i = 0; i < grid.size(); ++i) scores[i] = -distance(x, grid.weight(i));
    const auto [b1, b2] = best_two(scores);
    if (!grid_adjacent(grid, b1, b2, adjacency)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

double topographic_error(const SomGrid& grid, KernelEstimator& est,
                         std::span<const DataSample> data, Adjacency adjacency) {
  if (grid.size() < 2) throw ArgumentError("topographic error needs >= 2 neurons");
  if (data.empty()) throw ArgumentError("topographic error of an empty dataset");
  std::size_t errors = 0;
  std::vector<double> scores(grid.size());
  for (const auto& x : data) {
    const Statevector prepared = est.prepare(x);
    for (std::size_t i = 0; i < grid.size(); ++i) scores[i] = est.value(prepared, grid.weight(i));
    const auto [b1, b2] = best_two(scores);
    if (!grid_adjacent(grid, b1, b2, adjacency)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(data.size());
}

std::vector<int> majority_labels(const LabeledAssignment& assignment) {
  if (assignment.labels.size() != assignment.bmus.size()) {
    throw ShapeError("labels and bmus differ in length");
  }
  std::map<std::size_t, std::map<int, std::size_t>> votes;
  for (std::size_t i = 0; i < assignment.bmus.size(); ++i) {
    ++votes[assignment.bmus[i]][assignment.labels[i]];
  }
  std::map<std::size_t, int> winner;
  for (const auto& [neuron, tally] : votes) {
    int best = tally.begin()->first;
    std::size_t best_count = 0;
    for (const auto& [label, count] : tally) {
      if (count > best_count) {
        best = label;
        best_count = count;
      }
    }
    winner[neuron] = best;
  }
  std::vector<int> out(assignment.bmus.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = winner[assignment.bmus[i]];
  return out;
}

double map_purity(const LabeledAssignment& assignment) {
  if (assignment.labels.empty()) throw ArgumentError("purity of an empty assignment");
  const std::vector<int> majority = majority_labels(assignment);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < majority.size(); ++i) {
    if (majority[i] == assignment.labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(majority.size());
}

PointSet grid_points(const SomGrid& grid, std::span<const std::size_t> bmus) {
  PointSet out;
  out.reserve(bmus.size());
  for (std::size_t b : bmus) {
    const auto [r, c] = grid.coords(b);
    out.push_back({static_cast<double>(r), static_cast<double>(c)});
  }
  return out;
}

}  // namespace qsom
