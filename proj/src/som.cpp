#include "qsom/som.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsom/errors.hpp"
#include "qsom/random.hpp"

namespace qsom {

namespace {

void check_dim(const SomGrid& grid, std::span<const double> x) {
  if (x.size() != grid.dim()) {
    throw ShapeError("sample has " + std::to_string(x.size()) +
                     " components, grid weights have " + std::to_string(grid.dim()));
  }
}

void check_neuron(const SomGrid& grid, std::size_t i) {
  if (i >= grid.size()) {
    throw IndexError("neuron " + std::to_string(i) + " out of range for " +
                     std::to_string(grid.size()) + "-neuron grid");
  }
}

void check_dataset(std::size_t n) {
  if (n == 0) throw ArgumentError("training dataset is empty");
}

double euclidean_sq(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

template <typename Cost>
std::size_t argmin_neuron(std::size_t k, Cost&& cost) {
  std::size_t best = 0;
  double best_cost = cost(0);
  for (std::size_t i = 1; i < k; ++i) {
    const double c = cost(i);
    if (c < best_cost) {
      best = i;
      best_cost = c;
    }
  }
  return best;
}

BmuMatch argmax_fidelity(std::span<const double> scores) {
  BmuMatch m{0, scores[0]};
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > m.fidelity) m = {i, scores[i]};
  }
  return m;
}

}  // namespace

SomGrid::SomGrid(std::size_t rows, std::size_t cols, std::size_t dim)
    : rows_(rows), cols_(cols), dim_(dim) {
  if (rows == 0 || cols == 0) throw ArgumentError("grid needs rows, cols >= 1");
  if (dim == 0) throw ArgumentError("weight dimension must be >= 1");
  weights_.assign(rows * cols, std::vector<double>(dim, 0.0));
}

std::pair<std::size_t, std::size_t> SomGrid::coords(std::size_t neuron) const {
  check_neuron(*this, neuron);
  return {neuron / cols_, neuron % cols_};
}

std::size_t SomGrid::index(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw IndexError("grid coordinate out of range");
  return row * cols_ + col;
}

std::span<const double> SomGrid::weight(std::size_t neuron) const {
  check_neuron(*this, neuron);
  return weights_[neuron];
}

std::span<double> SomGrid::weight(std::size_t neuron) {
  check_neuron(*this, neuron);
  return weights_[neuron];
}

void SomGrid::set_weights(std::vector<std::vector<double>> weights) {
  if (weights.size() != rows_ * cols_) {
    throw ShapeError("expected " + std::to_string(rows_ * cols_) +
                     " weight vectors, got " + std::to_string(weights.size()));
  }
  for (const auto& w : weights) {
    if (w.size() != dim_) throw ShapeError("weight vector dimension mismatch");
  }
  weights_ = std::move(weights);
}

double Schedule::alpha(std::size_t t) const {
  const double tau = static_cast<double>(std::max<std::size_t>(total_iters, 1));
  return alpha0 * std::exp(-static_cast<double>(t) / tau);
}

double Schedule::sigma(std::size_t t) const {
  const double tau = static_cast<double>(std::max<std::size_t>(total_iters, 1));
  return std::max(sigma0 * std::exp(-static_cast<double>(t) / tau), sigma_floor);
}

void Schedule::validate() const {
  if (!(alpha0 > 0.0)) throw ArgumentError("alpha0 must be > 0");
  if (!(sigma0 > 0.0)) throw ArgumentError("sigma0 must be > 0");
  if (!(sigma_floor > 0.0)) throw ArgumentError("sigma_floor must be > 0");
}

double grid_distance(const SomGrid& grid, std::size_t i, std::size_t j) {
  const auto [ri, ci] = grid.coords(i);
  const auto [rj, cj] = grid.coords(j);
  const double dr = static_cast<double>(ri) - static_cast<double>(rj);
  const double dc = static_cast<double>(ci) - static_cast<double>(cj);
  return std::hypot(dr, dc);
}

double neighborhood(double d, double sigma) {
  if (!(sigma > 0.0)) throw ArgumentError("neighborhood width must be > 0");
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

void init_weights(SomGrid& grid, double low, double high, std::uint64_t seed) {
  if (!(low < high)) throw ArgumentError("init range needs low < high");
  Rng rng(seed);
  std::vector<std::vector<double>> w(grid.size(), std::vector<double>(grid.dim()));
  for (auto& v : w) {
    for (double& c : v) c = uniform(rng, low, high);
  }
  grid.set_weights(std::move(w));
}

// ---- Classical ----------------------------------------------------------------

std::size_t find_bmu_euclidean(const SomGrid& grid, std::span<const double> x) {
  check_dim(grid, x);
  return argmin_neuron(grid.size(),
                       [&](std::size_t i) { return euclidean_sq(x, grid.weight(i)); });
}

void update_classical(SomGrid& grid, std::span<const double> x, std::size_t bmu,
                      double alpha, double sigma) {
  check_dim(grid, x);
  check_neuron(grid, bmu);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double step = alpha * neighborhood(grid_distance(grid, i, bmu), sigma);
    auto w = grid.weight(i);
    for (std::size_t c = 0; c < w.size(); ++c) w[c] += step * (x[c] - w[c]);
  }
}

TrainingRecord train_classical(SomGrid& grid,
                               std::span<const std::vector<double>> data,
                               const Schedule& schedule, std::uint64_t seed) {
  check_dataset(data.size());
  schedule.validate();
  for (const auto& x : data) check_dim(grid, x);
  Rng rng(seed);
  TrainingRecord rec;
  rec.steps.reserve(schedule.total_iters);
  for (std::size_t t = 0; t < schedule.total_iters; ++t) {
    const std::size_t s = uniform_index(rng, data.size());
    const std::size_t bmu = find_bmu_euclidean(grid, data[s]);
    const double qe = std::sqrt(euclidean_sq(data[s], grid.weight(bmu)));
    const double a = schedule.alpha(t);
    const double sg = schedule.sigma(t);
    update_classical(grid, data[s], bmu, a, sg);
    rec.steps.push_back({s, bmu, a, sg, qe});
  }
  return rec;
}

// ---- Kernelized ---------------------------------------------------------------

RbfKernel::RbfKernel(double bandwidth) : bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0)) throw ArgumentError("RBF bandwidth must be > 0");
}

double RbfKernel::value(std::span<const double> a, std::span<const double> b) const {
  return std::exp(-euclidean_sq(a, b) / (2.0 * bandwidth_ * bandwidth_));
}

std::vector<double> RbfKernel::cross_gradient(std::span<const double> x,
                                              std::span<const double> w) const {
  const double k = value(x, w);
  const double inv = 1.0 / (bandwidth_ * bandwidth_);
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = k * (x[i] - w[i]) * inv;
  return g;
}

std::vector<double> RbfKernel::self_gradient(std::span<const double> w) const {
  return std::vector<double>(w.size(), 0.0);
}

PolynomialKernel::PolynomialKernel(double offset, int degree)
    : offset_(offset), degree_(degree) {
  if (degree < 1) throw ArgumentError("polynomial degree must be >= 1");
}

double PolynomialKernel::value(std::span<const double> a,
                               std::span<const double> b) const {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::pow(offset_ + dot, degree_);
}

std::vector<double> PolynomialKernel::cross_gradient(std::span<const double> x,
                                                     std::span<const double> w) const {
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * w[i];
  const double outer = degree_ * std::pow(offset_ + dot, degree_ - 1);
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = outer * x[i];
  return g;
}

std::vector<double> PolynomialKernel::self_gradient(std::span<const double> w) const {
  double dot = 0.0;
  for (double c : w) dot += c * c;
  const double outer = degree_ * std::pow(offset_ + dot, degree_ - 1);
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = outer * 2.0 * w[i];
  return g;
}

double kernel_distance_sq(const ClassicalKernel& kernel, std::span<const double> x,
                          std::span<const double> w) {
  return kernel.value(x, x) + kernel.value(w, w) - 2.0 * kernel.value(x, w);
}

std::size_t find_bmu_kernelized(const SomGrid& grid, std::span<const double> x,
                                const ClassicalKernel& kernel) {
  check_dim(grid, x);
  return argmin_neuron(grid.size(), [&](std::size_t i) {
    return kernel_distance_sq(kernel, x, grid.weight(i));
  });
}

void update_kernelized(SomGrid& grid, std::span<const double> x, std::size_t bmu,
                       double alpha, double sigma, const ClassicalKernel& kernel) {
  check_dim(grid, x);
  check_neuron(grid, bmu);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double step = alpha * neighborhood(grid_distance(grid, i, bmu), sigma);
    auto w = grid.weight(i);
    const std::vector<double> self = kernel.self_gradient(w);
    const std::vector<double> cross = kernel.cross_gradient(x, w);
    for (std::size_t c = 0; c < w.size(); ++c) {
      w[c] -= step * (self[c] - 2.0 * cross[c]);
    }
  }
}

TrainingRecord train_kernelized(SomGrid& grid,
                                std::span<const std::vector<double>> data,
                                const Schedule& schedule,
                                const ClassicalKernel& kernel, std::uint64_t seed) {
  check_dataset(data.size());
  schedule.validate();
  for (const auto& x : data) check_dim(grid, x);
  Rng rng(seed);
  TrainingRecord rec;
  rec.steps.reserve(schedule.total_iters);
  for (std::size_t t = 0; t < schedule.total_iters; ++t) {
    const std::size_t s = uniform_index(rng, data.size());
    const std::size_t bmu = find_bmu_kernelized(grid, data[s], kernel);
    const double qe =
        std::sqrt(std::max(0.0, kernel_distance_sq(kernel, data[s], grid.weight(bmu))));
    const double a = schedule.alpha(t);
    const double sg = schedule.sigma(t);
    update_kernelized(grid, data[s], bmu, a, sg, kernel);
    rec.steps.push_back({s, bmu, a, sg, qe});
  }
  return rec;
}

// ---- Quantum -------------------------------------------------------------------

BmuMatch match_quantum(const SomGrid& grid, KernelEstimator& est,
                       const Statevector& prepared) {
  const std::size_t k = grid.size();
  const std::uint64_t base = est.reserve(k);
  std::vector<double> scores(k);
  const auto kk = static_cast<std::int64_t>(k);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < kk; ++i) {
    scores[i] = est.value_at(base + static_cast<std::uint64_t>(i), prepared,
                             grid.weight(static_cast<std::size_t>(i)));
  }
  return argmax_fidelity(scores);
}

BmuMatch match_quantum_serial(const SomGrid& grid, KernelEstimator& est,
                              const Statevector& prepared) {
  const std::size_t k = grid.size();
  const std::uint64_t base = est.reserve(k);
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < k; ++i) {
    scores[i] = est.value_at(base + i, prepared, grid.weight(i));
  }
  return argmax_fidelity(scores);
}

std::size_t find_bmu_quantum(const SomGrid& grid, KernelEstimator& est,
                             const DataSample& x) {
  if (grid.dim() != est.weight_map().n_features) {
    throw ShapeError("grid weight dimension does not match the feature map");
  }
  return match_quantum(grid, est, est.prepare(x)).index;
}

std::size_t update_quantum(SomGrid& grid, const Statevector& prepared,
                           std::size_t bmu, double alpha, double sigma,
                           KernelEstimator& est, double h_cutoff) {
  check_neuron(grid, bmu);
  std::vector<std::size_t> active;
  std::vector<double> step;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double h = neighborhood(grid_distance(grid, i, bmu), sigma);
    if (h >= h_cutoff) {
      active.push_back(i);
      step.push_back(2.0 * alpha * h);
    }
  }
  if (active.empty() || alpha == 0.0) return 0;

  const std::uint64_t cost = est.gradient_cost();
  const std::uint64_t base = est.reserve(cost * active.size());
  std::vector<std::vector<double>> grads(active.size());
  const auto n = static_cast<std::int64_t>(active.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t a = 0; a < n; ++a) {
    grads[a] = est.gradient_at(base + static_cast<std::uint64_t>(a) * cost, prepared,
                               grid.weight(active[a]));
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    auto w = grid.weight(active[a]);
    for (std::size_t c = 0; c < w.size(); ++c) w[c] += step[a] * grads[a][c];
  }
  return active.size();
}

TrainingRecord train_quantum(SomGrid& grid, std::span<const DataSample> data,
                             const Schedule& schedule, KernelEstimator& est,
                             std::uint64_t seed, double h_cutoff) {
  check_dataset(data.size());
  schedule.validate();
  if (grid.dim() != est.weight_map().n_features) {
    throw ShapeError("grid weight dimension does not match the feature map");
  }
  std::vector<Statevector> prepared;
  prepared.reserve(data.size());
  for (const auto& x : data) prepared.push_back(est.prepare(x));

  Rng rng(seed);
  TrainingRecord rec;
  rec.steps.reserve(schedule.total_iters);
  for (std::size_t t = 0; t < schedule.total_iters; ++t) {
    const std::size_t s = uniform_index(rng, data.size());
    const std::uint64_t before = est.evaluations();
    const BmuMatch m = match_quantum(grid, est, prepared[s]);
    const std::uint64_t mid = est.evaluations();
    const double a = schedule.alpha(t);
    const double sg = schedule.sigma(t);
    update_quantum(grid, prepared[s], m.index, a, sg, est, h_cutoff);
    rec.bmu_evaluations += mid - before;
    rec.gradient_evaluations += est.evaluations() - mid;
    rec.steps.push_back({s, m.index, a, sg, fidelity_distance(m.fidelity)});
  }
  return rec;
}

// ---- Inference -----------------------------------------------------------------

std::vector<std::size_t> infer_euclidean(const SomGrid& grid,
                                         std::span<const std::vector<double>> data) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& x : data) out.push_back(find_bmu_euclidean(grid, x));
  return out;
}

std::vector<std::size_t> infer_kernelized(const SomGrid& grid,
                                          std::span<const std::vector<double>> data,
                                          const ClassicalKernel& kernel) {
  std::vector<std::size_t> out;
  out.reserve(data.size());
  for (const auto& x : data) out.push_back(find_bmu_kernelized(grid, x, kernel));
  return out;
}

std::vector<std::size_t> infer_quantum(const SomGrid& grid, KernelEstimator& est,
                                       std::span<const DataSample> data) {
  if (grid.dim() != est.weight_map().n_features) {
    throw ShapeError("grid weight dimension does not match the feature map");
  }
  std::vector<Statevector> prepared;
  prepared.reserve(data.size());
  for (const auto& x : data) prepared.push_back(est.prepare(x));

  const std::size_t k = grid.size();
  const std::uint64_t base = est.reserve(k * data.size());
  std::vector<std::size_t> out(data.size());
  const auto n = static_cast<std::int64_t>(data.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t s = 0; s < n; ++s) {
    std::vector<double> scores(k);
    for (std::size_t i = 0; i < k; ++i) {
      scores[i] = est.value_at(base + static_cast<std::uint64_t>(s) * k + i,
                               prepared[s], grid.weight(i));
    }
    out[s] = argmax_fidelity(scores).index;
  }
  return out;
}

}  // namespace qsom
