#include "qsom/featuremap.hpp"

#include <numbers>
#include <string>

#include "qsom/errors.hpp"

namespace qsom {

namespace {

void validate(const FeatureMapConfig& config, std::span<const double> vector) {
  if (config.n_features < 1) throw ArgumentError("n_features must be >= 1");
  if (config.reps < 1) throw ArgumentError("reps must be >= 1");
  if (vector.size() != config.n_features) {
    throw ShapeError("feature map expects " +
                     std::to_string(config.n_features) + " components, got " +
                     std::to_string(vector.size()));
  }
}

}  // namespace

double single_phase(double a) { return 2.0 * a; }

double pair_phase(double a, double b) {
  return 2.0 * (a - std::numbers::pi) * (b - std::numbers::pi);
}

FeatureCircuit build_feature_circuit(const FeatureMapConfig& config,
                                     std::span<const double> x) {
  validate(config, x);
  const std::size_t n = config.n_features;
  FeatureCircuit out;
  out.circuit.n_qubits = n;
  out.circuit.gates.reserve(config.reps * (3 * n));
  out.occurrences.reserve(occurrence_count(config));

  for (std::size_t rep = 0; rep < config.reps; ++rep) {
    for (std::size_t q = 0; q < n; ++q) {
      out.circuit.gates.push_back(Gate::single(GateKind::H, q));
    }
    for (std::size_t q = 0; q < n; ++q) {
      const std::size_t idx = out.circuit.gates.size();
      out.circuit.gates.push_back(
          Gate::single(GateKind::RZ, q, -2.0 * single_phase(x[q])));
      out.occurrences.push_back({idx, q, -4.0});
    }
    for (std::size_t q = 0; q + 1 < n; ++q) {
      const std::size_t idx = out.circuit.gates.size();
      out.circuit.gates.push_back(
          Gate::pair(GateKind::RZZ, q, q + 1, -2.0 * pair_phase(x[q], x[q + 1])));
      out.occurrences.push_back({idx, q, -4.0 * (x[q + 1] - std::numbers::pi)});
      out.occurrences.push_back({idx, q + 1, -4.0 * (x[q] - std::numbers::pi)});
    }
  }
  return out;
}

Statevector embed(const FeatureMapConfig& config, std::span<const double> x) {
  const FeatureCircuit fc = build_feature_circuit(config, x);
  return apply_circuit(zero_state(config.n_features), fc.circuit);
}

std::size_t occurrence_count(const FeatureMapConfig& config) {
  const std::size_t n = config.n_features;
  const std::size_t pairs = n > 0 ? n - 1 : 0;
  return config.reps * (n + 2 * pairs);
}

}  // namespace qsom
