#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qsom {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 20;

/// Dense amplitude vector over n qubits.
///
/// Basis ordering is little-endian: qubit q is bit q of the basis index, so
/// |q0 q1 ... q_{n-1}> lives at index sum_q q_k 2^k.
class Statevector {
 public:
  Statevector() = default;

  /// Wraps existing amplitudes. Length must be a power of two with
  /// 1 <= n <= kMaxQubits; the norm is not checked here.
  explicit Statevector(std::vector<Complex> amplitudes);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }

  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> mutable_amplitudes() { return amplitudes_; }

  const Complex& operator[](std::size_t i) const { return amplitudes_[i]; }

  double norm_squared() const;

  friend bool operator==(const Statevector&, const Statevector&) = default;

 private:
  std::size_t n_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

enum class GateKind : std::uint8_t { H, X, Y, Z, RX, RY, RZ, RZZ, CX };

const char* to_string(GateKind kind);
bool is_rotation(GateKind kind);
std::size_t arity(GateKind kind);

/// One gate. Rotations use R_P(angle) = exp(-i angle P / 2); RZZ uses
/// P = Z⊗Z. For CX, targets[0] is the control.
struct Gate {
  GateKind kind = GateKind::H;
  std::vector<std::size_t> targets;
  double angle = 0.0;

  static Gate single(GateKind kind, std::size_t q, double angle = 0.0);
  static Gate pair(GateKind kind, std::size_t a, std::size_t b,
                   double angle = 0.0);
};

/// Conjugate transpose of a gate.
Gate adjoint(const Gate& gate);

struct Circuit {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;
};

/// Inverse circuit: gates reversed and each replaced by its adjoint.
Circuit adjoint(const Circuit& circuit);

Statevector zero_state(std::size_t n_qubits);

/// Returns the state with `gate` applied. Parallel over amplitude pairs once
/// the register is large enough to amortize thread start-up.
Statevector apply_gate(Statevector state, const Gate& gate);
Statevector apply_circuit(Statevector state, const Circuit& circuit);

/// In-place forms used by the hot paths.
void apply_gate_inplace(Statevector& state, const Gate& gate);
void apply_circuit_inplace(Statevector& state, const Circuit& circuit);

/// Reference single-threaded implementation, kept for tests and benchmarks.
void apply_gate_serial(Statevector& state, const Gate& gate);

/// <a|b>.
Complex inner_product(const Statevector& a, const Statevector& b);
Complex inner_product_serial(const Statevector& a, const Statevector& b);

/// |<a|b>|^2, clamped to [0, 1].
double overlap_probability(const Statevector& a, const Statevector& b);

/// Fraction of `shots` measurements in the computational basis that return
/// the all-zeros bitstring. Each shot is drawn from |amplitude|^2 with a
/// generator seeded from `seed`.
double sample_zero_outcome(const Statevector& state, std::uint64_t shots,
                           std::uint64_t seed);

}  // namespace qsom
