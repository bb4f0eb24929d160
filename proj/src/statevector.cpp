#include "qsom/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qsom/errors.hpp"
#include "qsom/random.hpp"

namespace qsom {

namespace {

// Below this many amplitude pairs a parallel region costs more than it saves.
constexpr std::int64_t kParallelPairs = std::int64_t{1} << 13;

constexpr Complex kI{0.0, 1.0};

// Spread index k over the positions left free by clearing bit q.
inline std::size_t insert_zero_bit(std::size_t k, std::size_t q) {
  const std::size_t low = k & ((std::size_t{1} << q) - 1);
  return ((k >> q) << (q + 1)) | low;
}

struct Matrix2 {
  Complex m00, m01, m10, m11;
};

Matrix2 single_qubit_matrix(const Gate& g) {
  const double c = std::cos(g.angle / 2.0);
  const double s = std::sin(g.angle / 2.0);
  switch (g.kind) {
    case GateKind::H: {
      const double r = 1.0 / std::sqrt(2.0);
      return {r, r, r, -r};
    }
    case GateKind::X:
      return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
      return {0.0, -kI, kI, 0.0};
    case GateKind::Z:
      return {1.0, 0.0, 0.0, -1.0};
    case GateKind::RX:
      return {c, -kI * s, -kI * s, c};
    case GateKind::RY:
      return {c, -s, s, c};
    case GateKind::RZ:
      return {std::polar(1.0, -g.angle / 2.0), 0.0, 0.0,
              std::polar(1.0, g.angle / 2.0)};
    default:
      throw ArgumentError("not a single-qubit gate");
  }
}

void validate(const Statevector& state, const Gate& gate) {
  if (gate.targets.size() != arity(gate.kind)) {
    throw ArgumentError(std::string(to_string(gate.kind)) + " takes " +
                        std::to_string(arity(gate.kind)) + " target(s)");
  }
  for (std::size_t q : gate.targets) {
    if (q >= state.n_qubits()) {
      throw IndexError("gate target " + std::to_string(q) +
                       " out of range for " + std::to_string(state.n_qubits()) +
                       "-qubit state");
    }
  }
  if (gate.targets.size() == 2 && gate.targets[0] == gate.targets[1]) {
    throw IndexError("two-qubit gate targets must be distinct");
  }
}

void apply_single(std::span<Complex> amps, std::size_t q, const Matrix2& m,
                  bool parallel) {
  const auto pairs = static_cast<std::int64_t>(amps.size() / 2);
  const std::size_t stride = std::size_t{1} << q;
#pragma omp parallel for schedule(static) if (parallel && pairs >= kParallelPairs)
  for (std::int64_t k = 0; k < pairs; ++k) {
    const std::size_t i0 = insert_zero_bit(static_cast<std::size_t>(k), q);
    const std::size_t i1 = i0 | stride;
    const Complex a0 = amps[i0];
    const Complex a1 = amps[i1];
    amps[i0] = m.m00 * a0 + m.m01 * a1;
    amps[i1] = m.m10 * a0 + m.m11 * a1;
  }
}

void apply_rzz(std::span<Complex> amps, std::size_t a, std::size_t b,
               double angle, bool parallel) {
  const Complex even = std::polar(1.0, -angle / 2.0);
  const Complex odd = std::polar(1.0, angle / 2.0);
  const auto dim = static_cast<std::int64_t>(amps.size());
#pragma omp parallel for schedule(static) if (parallel && dim >= 2 * kParallelPairs)
  for (std::int64_t i = 0; i < dim; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const bool parity = (((idx >> a) ^ (idx >> b)) & 1U) != 0U;
    amps[idx] *= parity ? odd : even;
  }
}

void apply_cx(std::span<Complex> amps, std::size_t control, std::size_t target,
              bool parallel) {
  const auto pairs = static_cast<std::int64_t>(amps.size() / 2);
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
#pragma omp parallel for schedule(static) if (parallel && pairs >= kParallelPairs)
  for (std::int64_t k = 0; k < pairs; ++k) {
    const std::size_t i0 = insert_zero_bit(static_cast<std::size_t>(k), target);
    if ((i0 & cmask) != 0U) std::swap(amps[i0], amps[i0 | tmask]);
  }
}

void apply_impl(Statevector& state, const Gate& gate, bool parallel) {
  validate(state, gate);
  auto amps = state.mutable_amplitudes();
  switch (gate.kind) {
    case GateKind::RZZ:
      apply_rzz(amps, gate.targets[0], gate.targets[1], gate.angle, parallel);
      break;
    case GateKind::CX:
      apply_cx(amps, gate.targets[0], gate.targets[1], parallel);
      break;
    default:
      apply_single(amps, gate.targets[0], single_qubit_matrix(gate), parallel);
      break;
  }
}

}  // namespace

Statevector::Statevector(std::vector<Complex> amplitudes)
    : amplitudes_(std::move(amplitudes)) {
  const std::size_t dim = amplitudes_.size();
  if (dim < 2 || !std::has_single_bit(dim)) {
    throw ShapeError("statevector length must be a power of two >= 2, got " +
                     std::to_string(dim));
  }
  n_qubits_ = static_cast<std::size_t>(std::countr_zero(dim));
  if (n_qubits_ > kMaxQubits) {
    throw SizeError("at most " + std::to_string(kMaxQubits) +
                    " qubits supported");
  }
}

double Statevector::norm_squared() const {
  double acc = 0.0;
  for (const Complex& a : amplitudes_) acc += std::norm(a);
  return acc;
}

const char* to_string(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::RZZ: return "RZZ";
    case GateKind::CX: return "CX";
  }
  return "?";
}

bool is_rotation(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RY ||
         kind == GateKind::RZ || kind == GateKind::RZZ;
}

std::size_t arity(GateKind kind) {
  return (kind == GateKind::RZZ || kind == GateKind::CX) ? 2 : 1;
}

Gate Gate::single(GateKind kind, std::size_t q, double angle) {
  return Gate{kind, {q}, angle};
}

Gate Gate::pair(GateKind kind, std::size_t a, std::size_t b, double angle) {
  return Gate{kind, {a, b}, angle};
}

Gate adjoint(const Gate& gate) {
  Gate out = gate;
  if (is_rotation(gate.kind)) out.angle = -gate.angle;
  return out;
}

Circuit adjoint(const Circuit& circuit) {
  Circuit out{circuit.n_qubits, {}};
  out.gates.reserve(circuit.gates.size());
  for (auto it = circuit.gates.rbegin(); it != circuit.gates.rend(); ++it) {
    out.gates.push_back(adjoint(*it));
  }
  return out;
}

Statevector zero_state(std::size_t n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits) {
    throw SizeError("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                    "], got " + std::to_string(n_qubits));
  }
  std::vector<Complex> amps(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
  amps[0] = 1.0;
  return Statevector(std::move(amps));
}

void apply_gate_inplace(Statevector& state, const Gate& gate) {
  apply_impl(state, gate, true);
}

void apply_gate_serial(Statevector& state, const Gate& gate) {
  apply_impl(state, gate, false);
}

void apply_circuit_inplace(Statevector& state, const Circuit& circuit) {
  if (circuit.n_qubits != state.n_qubits()) {
    throw ShapeError("circuit acts on " + std::to_string(circuit.n_qubits) +
                     " qubits, state has " + std::to_string(state.n_qubits()));
  }
  for (const Gate& g : circuit.gates) apply_gate_inplace(state, g);
}

Statevector apply_gate(Statevector state, const Gate& gate) {
  apply_gate_inplace(state, gate);
  return state;
}

Statevector apply_circuit(Statevector state, const Circuit& circuit) {
  apply_circuit_inplace(state, circuit);
  return state;
}

namespace {
void check_same_shape(const Statevector& a, const Statevector& b) {
  if (a.dimension() != b.dimension()) {
    throw ShapeError("overlap of " + std::to_string(a.n_qubits()) + "- and " +
                     std::to_string(b.n_qubits()) + "-qubit states");
  }
}
}  // namespace

Complex inner_product(const Statevector& a, const Statevector& b) {
  check_same_shape(a, b);
  const auto dim = static_cast<std::int64_t>(a.dimension());
  const Complex* pa = a.amplitudes().data();
  const Complex* pb = b.amplitudes().data();
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for reduction(+ : re, im) schedule(static) if (dim >= 4 * kParallelPairs)
  for (std::int64_t i = 0; i < dim; ++i) {
    const Complex t = std::conj(pa[i]) * pb[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

Complex inner_product_serial(const Statevector& a, const Statevector& b) {
  check_same_shape(a, b);
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    acc += std::conj(a[i]) * b[i];
  }
  return acc;
}

double overlap_probability(const Statevector& a, const Statevector& b) {
  return std::clamp(std::norm(inner_product(a, b)), 0.0, 1.0);
}

double sample_zero_outcome(const Statevector& state, std::uint64_t shots,
                           std::uint64_t seed) {
  if (shots == 0) throw ArgumentError("shots must be >= 1");
  std::vector<double> cumulative(state.dimension());
  double acc = 0.0;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    acc += std::norm(state[i]);
    cumulative[i] = acc;
  }
  if (!(acc > 0.0)) throw ArgumentError("cannot sample from a zero vector");
  // Normalize away rounding so the last bucket closes at exactly 1.
  for (double& c : cumulative) c /= acc;
  cumulative.back() = 1.0;

  Rng rng(seed);
  std::uint64_t zeros = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = uniform01(rng);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.begin()) ++zeros;
  }
  return static_cast<double>(zeros) / static_cast<double>(shots);
}

}  // namespace qsom
