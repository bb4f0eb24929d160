#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qsom/kernel.hpp"

namespace qsom {

/// Rectangular neuron lattice. Neuron i sits at (i / cols, i % cols) and owns
/// one weight vector of length dim (w_i for the classical trainers, theta_i
/// for the quantum one).
class SomGrid {
 public:
  SomGrid() = default;
  SomGrid(std::size_t rows, std::size_t cols, std::size_t dim);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }

  std::pair<std::size_t, std::size_t> coords(std::size_t neuron) const;
  std::size_t index(std::size_t row, std::size_t col) const;

  std::span<const double> weight(std::size_t neuron) const;
  std::span<double> weight(std::size_t neuron);

  const std::vector<std::vector<double>>& weights() const { return weights_; }
  void set_weights(std::vector<std::vector<double>> weights);

  friend bool operator==(const SomGrid&, const SomGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<double>> weights_;
};

/// Exponential decay: alpha(t) = alpha0 exp(-t/tau), sigma(t) likewise but
/// floored at sigma_floor; tau = total_iters.
struct Schedule {
  double alpha0 = 1.0;
  double sigma0 = 5.0;
  std::size_t total_iters = 500;
  double sigma_floor = 0.1;

  double alpha(std::size_t t) const;
  double sigma(std::size_t t) const;
  void validate() const;
};

struct TrainingStep {
  std::size_t sample_index = 0;
  std::size_t bmu = 0;
  double alpha = 0.0;
  double sigma = 0.0;
  /// Distance of this iteration's sample to its BMU before the update.
  double quantization_error = 0.0;

  friend bool operator==(const TrainingStep&, const TrainingStep&) = default;
};

struct TrainingRecord {
  std::vector<TrainingStep> steps;
  std::uint64_t bmu_evaluations = 0;
  std::uint64_t gradient_evaluations = 0;

  friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

double grid_distance(const SomGrid& grid, std::size_t i, std::size_t j);

/// Gaussian neighbourhood exp(-d^2 / (2 sigma^2)).
double neighborhood(double d, double sigma);

/// Uniform i.i.d. components in [low, high).
void init_weights(SomGrid& grid, double low, double high, std::uint64_t seed);

// ---- Classical Euclidean SOM ------------------------------------------------

std::size_t find_bmu_euclidean(const SomGrid& grid, std::span<const double> x);

/// w_i += alpha h(d(i, bmu)) (x - w_i) for every neuron.
void update_classical(SomGrid& grid, std::span<const double> x, std::size_t bmu,
                      double alpha, double sigma);

TrainingRecord train_classical(SomGrid& grid,
                               std::span<const std::vector<double>> data,
                               const Schedule& schedule, std::uint64_t seed);

// ---- Kernelized SOM ---------------------------------------------------------

/// Classical kernel with the two derivatives the kernelized update needs.
class ClassicalKernel {
 public:
  virtual ~ClassicalKernel() = default;
  virtual double value(std::span<const double> a, std::span<const double> b) const = 0;
  /// d/dw K(x, w).
  virtual std::vector<double> cross_gradient(std::span<const double> x,
                                             std::span<const double> w) const = 0;
  /// d/dw K(w, w).
  virtual std::vector<double> self_gradient(std::span<const double> w) const = 0;
};

/// exp(-||a - b||^2 / (2 bandwidth^2)); K(w, w) = 1.
class RbfKernel final : public ClassicalKernel {
 public:
  explicit RbfKernel(double bandwidth);
  double value(std::span<const double> a, std::span<const double> b) const override;
  std::vector<double> cross_gradient(std::span<const double> x,
                                     std::span<const double> w) const override;
  std::vector<double> self_gradient(std::span<const double> w) const override;
  double bandwidth() const { return bandwidth_; }

 private:
  double bandwidth_;
};

/// (offset + a.b)^degree.
class PolynomialKernel final : public ClassicalKernel {
 public:
  PolynomialKernel(double offset, int degree);
  double value(std::span<const double> a, std::span<const double> b) const override;
  std::vector<double> cross_gradient(std::span<const double> x,
                                     std::span<const double> w) const override;
  std::vector<double> self_gradient(std::span<const double> w) const override;

 private:
  double offset_;
  int degree_;
};

/// Feature-space squared distance K(x,x) + K(w,w) - 2K(x,w).
double kernel_distance_sq(const ClassicalKernel& kernel, std::span<const double> x,
                          std::span<const double> w);

std::size_t find_bmu_kernelized(const SomGrid& grid, std::span<const double> x,
                                const ClassicalKernel& kernel);

/// w_i -= alpha h (dK(w,w)/dw - 2 dK(x,w)/dw) at w = w_i.
void update_kernelized(SomGrid& grid, std::span<const double> x, std::size_t bmu,
                       double alpha, double sigma, const ClassicalKernel& kernel);

TrainingRecord train_kernelized(SomGrid& grid,
                                std::span<const std::vector<double>> data,
                                const Schedule& schedule,
                                const ClassicalKernel& kernel, std::uint64_t seed);

// ---- Variational quantum SOM ------------------------------------------------

struct BmuMatch {
  std::size_t index = 0;
  double fidelity = 0.0;
};

/// argmax_i K(x, theta_i), lowest index on ties. Exactly grid.size() kernel
/// evaluations, run in parallel over neurons.
BmuMatch match_quantum(const SomGrid& grid, KernelEstimator& est,
                       const Statevector& prepared);
BmuMatch match_quantum_serial(const SomGrid& grid, KernelEstimator& est,
                              const Statevector& prepared);

std::size_t find_bmu_quantum(const SomGrid& grid, KernelEstimator& est,
                             const DataSample& x);

inline constexpr double kDefaultHCutoff = 1e-3;

/// theta_i += 2 alpha h grad_theta K(x, theta_i) for every neuron with
/// h(d(i, bmu)) >= h_cutoff. Gradients run in parallel over neurons.
/// Returns the number of neurons updated.
std::size_t update_quantum(SomGrid& grid, const Statevector& prepared,
                           std::size_t bmu, double alpha, double sigma,
                           KernelEstimator& est, double h_cutoff = kDefaultHCutoff);

TrainingRecord train_quantum(SomGrid& grid, std::span<const DataSample> data,
                             const Schedule& schedule, KernelEstimator& est,
                             std::uint64_t seed, double h_cutoff = kDefaultHCutoff);

// ---- Inference ---------------------------------------------------------------

std::vector<std::size_t> infer_euclidean(const SomGrid& grid,
                                         std::span<const std::vector<double>> data);

std::vector<std::size_t> infer_kernelized(const SomGrid& grid,
                                          std::span<const std::vector<double>> data,
                                          const ClassicalKernel& kernel);

/// BMU per sample; parallel over samples. Uses exactly data.size() *
/// grid.size() kernel evaluations.
std::vector<std::size_t> infer_quantum(const SomGrid& grid, KernelEstimator& est,
                                       std::span<const DataSample> data);

}  // namespace qsom
