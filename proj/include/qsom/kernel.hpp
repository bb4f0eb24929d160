#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qsom/featuremap.hpp"
#include "qsom/statevector.hpp"

namespace qsom {

struct ExactMode {};

struct ShotsMode {
  std::uint64_t shots = 1024;
  std::uint64_t seed = 0;
};

using EstimatorMode = std::variant<ExactMode, ShotsMode>;

/// Data-side input to the kernel: a classical vector to be embedded with the
/// data feature map, or an already prepared quantum state.
using DataSample = std::variant<std::vector<double>, Statevector>;

/// Fidelity kernel K(x, theta) = |<0|U^dagger(x) U(theta)|0>|^2 and its
/// parameter-shift gradient in theta.
///
/// Every circuit execution bumps `evaluations()`: one per kernel value and two
/// per parameter occurrence per gradient. In shots mode the sampling seed of
/// an evaluation is derived from (mode seed, counter value at that
/// evaluation), so a run is reproducible as long as the order of reservations
/// is. Concurrent callers reserve a contiguous block with `reserve` and use the
/// `*_at` forms, which never touch the counter.
class KernelEstimator {
 public:
  explicit KernelEstimator(FeatureMapConfig weight_map,
                           EstimatorMode mode = ExactMode{},
                           std::optional<FeatureMapConfig> data_map = {});

  KernelEstimator(const KernelEstimator& other);
  KernelEstimator& operator=(const KernelEstimator& other);

  const FeatureMapConfig& weight_map() const { return weight_map_; }
  const FeatureMapConfig& data_map() const { return data_map_; }
  const EstimatorMode& mode() const { return mode_; }
  bool is_exact() const { return std::holds_alternative<ExactMode>(mode_); }
  std::size_t n_qubits() const { return weight_map_.n_features; }

  /// Embeds a classical sample with the data map, or validates a prepared one.
  Statevector prepare(const DataSample& x) const;

  double value(const DataSample& x, std::span<const double> theta);
  double value(const Statevector& prepared, std::span<const double> theta);

  /// dK/dtheta via the two-term shift rule on every parameter occurrence.
  std::vector<double> gradient(const DataSample& x, std::span<const double> theta);
  std::vector<double> gradient(const Statevector& prepared,
                               std::span<const double> theta);

  /// Claims `n` consecutive evaluation slots; returns the first.
  std::uint64_t reserve(std::uint64_t n);

  double value_at(std::uint64_t slot, const Statevector& prepared,
                  std::span<const double> theta) const;
  std::vector<double> gradient_at(std::uint64_t slot, const Statevector& prepared,
                                  std::span<const double> theta) const;

  /// Circuit evaluations consumed by one gradient call.
  std::uint64_t gradient_cost() const { return 2 * occurrence_count(weight_map_); }

  std::uint64_t evaluations() const { return counter_.load(); }
  void reset_counter() { counter_.store(0); }

 private:
  double evaluate(std::uint64_t slot, const Statevector& prepared,
                  const Circuit& weight_circuit) const;

  FeatureMapConfig weight_map_;
  FeatureMapConfig data_map_;
  EstimatorMode mode_;
  std::atomic<std::uint64_t> counter_{0};
};

/// Hilbert-Schmidt distance between pure states with fidelity k:
/// ||rho - sigma||_HS = sqrt(2 - 2k).
double fidelity_distance(double k);

/// Exact-mode Gram matrix over a set of weight vectors, row-major.
std::vector<double> gram_matrix(const FeatureMapConfig& map,
                                std::span<const std::vector<double>> points);
std::vector<double> gram_matrix_serial(const FeatureMapConfig& map,
                                       std::span<const std::vector<double>> points);

}  // namespace qsom
