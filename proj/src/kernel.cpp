#include "qsom/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qsom/errors.hpp"
#include "qsom/random.hpp"

namespace qsom {

namespace {

constexpr double kShift = std::numbers::pi / 2.0;

void check_theta(const FeatureMapConfig& map, std::span<const double> theta) {
  if (theta.size() != map.n_features) {
    throw ShapeError("weight vector has " + std::to_string(theta.size()) +
                     " components, feature map expects " +
                     std::to_string(map.n_features));
  }
}

}  // namespace

KernelEstimator::KernelEstimator(FeatureMapConfig weight_map, EstimatorMode mode,
                                 std::optional<FeatureMapConfig> data_map)
    : weight_map_(weight_map),
      data_map_(data_map.value_or(weight_map)),
      mode_(mode) {
  if (weight_map_.n_features < 1 || weight_map_.reps < 1) {
    throw ArgumentError("feature map needs n_features >= 1 and reps >= 1");
  }
  if (data_map_.n_features != weight_map_.n_features) {
    throw ShapeError("data and weight feature maps act on different registers");
  }
  if (const auto* s = std::get_if<ShotsMode>(&mode_); s && s->shots == 0) {
    throw ArgumentError("shots must be >= 1");
  }
}

KernelEstimator::KernelEstimator(const KernelEstimator& other)
    : weight_map_(other.weight_map_),
      data_map_(other.data_map_),
      mode_(other.mode_),
      counter_(other.counter_.load()) {}

KernelEstimator& KernelEstimator::operator=(const KernelEstimator& other) {
  weight_map_ = other.weight_map_;
  data_map_ = other.data_map_;
  mode_ = other.mode_;
  counter_.store(other.counter_.load());
  return *this;
}

Statevector KernelEstimator::prepare(const DataSample& x) const {
  if (const auto* v = std::get_if<std::vector<double>>(&x)) {
    return embed(data_map_, *v);
  }
  const auto& state = std::get<Statevector>(x);
  if (state.n_qubits() != n_qubits()) {
    throw ShapeError("quantum sample has " + std::to_string(state.n_qubits()) +
                     " qubits, kernel expects " + std::to_string(n_qubits()));
  }
  return state;
}

std::uint64_t KernelEstimator::reserve(std::uint64_t n) {
  return counter_.fetch_add(n);
}

double KernelEstimator::evaluate(std::uint64_t slot, const Statevector& prepared,
                                 const Circuit& weight_circuit) const {
  if (is_exact()) {
    const Statevector weight_state =
        apply_circuit(zero_state(n_qubits()), weight_circuit);
    return overlap_probability(prepared, weight_state);
  }
  // Compute-uncompute: U(x) prepares the data state, U^dagger(theta) maps the
  // neuron state back to |0...0>; the all-zeros frequency estimates K.
  const auto& shots = std::get<ShotsMode>(mode_);
  const Statevector probe = apply_circuit(prepared, adjoint(weight_circuit));
  return sample_zero_outcome(probe, shots.shots, derive_seed(shots.seed, slot));
}

double KernelEstimator::value_at(std::uint64_t slot, const Statevector& prepared,
                                 std::span<const double> theta) const {
  check_theta(weight_map_, theta);
  if (prepared.n_qubits() != n_qubits()) {
    throw ShapeError("prepared state does not match kernel register");
  }
  return evaluate(slot, prepared, build_feature_circuit(weight_map_, theta).circuit);
}

std::vector<double> KernelEstimator::gradient_at(std::uint64_t slot,
                                                 const Statevector& prepared,
                                                 std::span<const double> theta) const {
  check_theta(weight_map_, theta);
  if (prepared.n_qubits() != n_qubits()) {
    throw ShapeError("prepared state does not match kernel register");
  }
  FeatureCircuit fc = build_feature_circuit(weight_map_, theta);
  std::vector<double> grad(theta.size(), 0.0);
  for (const ParamOccurrence& occ : fc.occurrences) {
    double& angle = fc.circuit.gates[occ.gate_index].angle;
    const double base = angle;
    angle = base + kShift;
    const double plus = evaluate(slot++, prepared, fc.circuit);
    angle = base - kShift;
    const double minus = evaluate(slot++, prepared, fc.circuit);
    angle = base;
    // omega = 1 for exp(-i angle P / 2) with P^2 = I: denominator 2 sin(pi/2).
    grad[occ.param_index] += occ.chain_factor * (plus - minus) / 2.0;
  }
  return grad;
}

double KernelEstimator::value(const DataSample& x, std::span<const double> theta) {
  return value(prepare(x), theta);
}

double KernelEstimator::value(const Statevector& prepared,
                              std::span<const double> theta) {
  check_theta(weight_map_, theta);
  return value_at(reserve(1), prepared, theta);
}

std::vector<double> KernelEstimator::gradient(const DataSample& x,
                                              std::span<const double> theta) {
  return gradient(prepare(x), theta);
}

std::vector<double> KernelEstimator::gradient(const Statevector& prepared,
                                              std::span<const double> theta) {
  check_theta(weight_map_, theta);
  return gradient_at(reserve(gradient_cost()), prepared, theta);
}

double fidelity_distance(double k) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * k));
}

std::vector<double> gram_matrix(const FeatureMapConfig& map,
                                std::span<const std::vector<double>> points) {
  const auto n = static_cast<std::int64_t>(points.size());
  std::vector<Statevector> states(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) states[i] = embed(map, points[i]);
  std::vector<double> gram(points.size() * points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i; j < n; ++j) {
      const double k = overlap_probability(states[i], states[j]);
      gram[i * n + j] = k;
      gram[j * n + i] = k;
    }
  }
  return gram;
}

std::vector<double> gram_matrix_serial(const FeatureMapConfig& map,
                                       std::span<const std::vector<double>> points) {
  const std::size_t n = points.size();
  std::vector<Statevector> states;
  states.reserve(n);
  for (const auto& p : points) states.push_back(embed(map, p));
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double k = overlap_probability(states[i], states[j]);
      gram[i * n + j] = k;
      gram[j * n + i] = k;
    }
  }
  return gram;
}

}  // namespace qsom
