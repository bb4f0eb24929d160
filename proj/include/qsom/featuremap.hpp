#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qsom/statevector.hpp"

namespace qsom {

/// ZZ feature map with nearest-neighbour ("pairwise") entanglement.
///
/// Each repetition applies H on every qubit followed by
///   exp(i sum_i phi(x_i) Z_i + i sum_i phi2(x_i, x_{i+1}) Z_i Z_{i+1})
/// with phi(a) = 2a and phi2(a, b) = 2(a - pi)(b - pi). Under the
/// RZ(l) = exp(-i l Z / 2) convention the single terms are RZ(-2 phi) and the
/// pair terms RZZ(-2 phi2).
struct FeatureMapConfig {
  std::size_t n_features = 0;
  std::size_t reps = 2;

  friend bool operator==(const FeatureMapConfig&,
                         const FeatureMapConfig&) = default;
};

double single_phase(double a);
double pair_phase(double a, double b);

/// One dependence of a rotation angle on one component of the bound vector.
/// `chain_factor` is d(angle)/d(vector[param_index]) at the bound vector.
struct ParamOccurrence {
  std::size_t gate_index = 0;
  std::size_t param_index = 0;
  double chain_factor = 0.0;
};

struct FeatureCircuit {
  Circuit circuit;
  std::vector<ParamOccurrence> occurrences;
};

FeatureCircuit build_feature_circuit(const FeatureMapConfig& config,
                                     std::span<const double> vector);

/// U_Phi(x)|0...0>.
Statevector embed(const FeatureMapConfig& config, std::span<const double> vector);

/// Number of ParamOccurrence entries a built circuit carries. Depends only on
/// the config, not on the bound values.
std::size_t occurrence_count(const FeatureMapConfig& config);

}  // namespace qsom
