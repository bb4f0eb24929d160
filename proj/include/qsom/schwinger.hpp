#pragma once

#include <cstddef>
#include <filesystem>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qsom/statevector.hpp"

namespace qsom {

inline constexpr std::size_t kMaxSchwingerSites = 10;

/// Which reading of the averaged electric field to evaluate.
///
/// kLinkAverage: (1/(N-1)) sum_n <L_n>, L_n = sum_{i<=n} (Z_i + (-1)^i)/2, the
///   mean over links of the link electric field (background term excluded).
/// kPrintedDoubleSum: the printed form (1/N) sum_n sum_i (Z_i + (-1)^i)/2
///   taken literally; the outer sum is trivial so this is the total staggered
///   charge sum_i (Z_i + (-1)^i)/2 = sum_i Z_i / 2. H conserves it, so it is
///   exactly quantized on non-degenerate eigenstates.
enum class FieldReading { kLinkAverage, kPrintedDoubleSum };

/// Lattice Schwinger model after Jordan-Wigner, open chain of n_sites spins:
///   H = J sum_{n=0}^{N-2} (sum_{i<=n} (Z_i + (-1)^i)/2 + theta/2pi)^2
///     + (w/2) sum_{n=0}^{N-2} (X_n X_{n+1} + Y_n Y_{n+1})
///     + (m/2) sum_{n=0}^{N-1} (-1)^n Z_n
struct SchwingerConfig {
  std::size_t n_sites = 4;
  double J = 1.0;
  double w = 1.0;
  double m = 0.0;
  double g = 1.0;  // m = (m/g) * g along the sweep
  double theta = std::numbers::pi;
  std::vector<double> mass_sweep;  // m/g values, strictly increasing
  std::size_t states_per_point = 2;
  FieldReading reading = FieldReading::kPrintedDoubleSum;
  double label_tolerance = 1e-8;
  double degeneracy_gap = 1e-10;

  void validate() const;
};

/// `points` evenly spaced m/g values on [low, high].
std::vector<double> linear_sweep(double low, double high, std::size_t points);

struct LabeledQuantumState {
  std::size_t n_sites = 0;
  double m_over_g = 0.0;
  double theta = 0.0;
  std::size_t level = 0;  // 0 = ground state
  double energy = 0.0;
  double avg_field = 0.0;
  double link_field = 0.0;
  int label = 0;
  bool degenerate = false;
  double residual = 0.0;  // ||H psi - E psi||
  std::vector<Complex> amplitudes;
};

/// Dense real-symmetric Hamiltonian at config.m, 2^N x 2^N, little-endian.
Eigen::MatrixXd build_hamiltonian(const SchwingerConfig& config);

/// <psi| E |psi> under the chosen reading. psi must be normalized.
double average_field(std::span<const Complex> psi, std::size_t n_sites,
                     FieldReading reading = FieldReading::kLinkAverage);

/// 0 if |E| <= tol, else 1.
int field_label(double avg_field, double tolerance);

/// Lowest `states_per_point` eigenstates at each sweep point, labeled.
std::vector<LabeledQuantumState> ground_states(const SchwingerConfig& config);

void export_dataset(std::span<const LabeledQuantumState> states,
                    const std::filesystem::path& path);
std::vector<LabeledQuantumState> load_dataset(const std::filesystem::path& path);

}  // namespace qsom
