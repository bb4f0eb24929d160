#include "qsom/schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsom/errors.hpp"

namespace qsom {

namespace {

inline int spin_z(std::size_t basis, std::size_t site) {
  return ((basis >> site) & 1U) != 0U ? -1 : 1;
}

inline int stagger(std::size_t site) { return site % 2 == 0 ? 1 : -1; }

// (Z_i + (-1)^i)/2 on a basis state; takes values in {-1, 0, 1}.
inline double site_charge(std::size_t basis, std::size_t site) {
  return 0.5 * (spin_z(basis, site) + stagger(site));
}

}  // namespace

void SchwingerConfig::validate() const {
  if (n_sites < 2 || n_sites % 2 != 0) {
    throw ArgumentError("n_sites must be even and >= 2, got " + std::to_string(n_sites));
  }
  if (n_sites > kMaxSchwingerSites) {
    throw SizeError("n_sites " + std::to_string(n_sites) +
                    " exceeds the dense diagonalization limit of " +
                    std::to_string(kMaxSchwingerSites));
  }
  for (std::size_t i = 1; i < mass_sweep.size(); ++i) {
    if (!(mass_sweep[i] > mass_sweep[i - 1])) {
      throw ArgumentError("mass_sweep must be strictly increasing");
    }
  }
  if (states_per_point < 1 || states_per_point > (std::size_t{1} << n_sites)) {
    throw ArgumentError("states_per_point out of range");
  }
  if (!(label_tolerance >= 0.0)) throw ArgumentError("label_tolerance must be >= 0");
}

std::vector<double> linear_sweep(double low, double high, std::size_t points) {
  if (points == 0) throw ArgumentError("sweep needs at least one point");
  if (points == 1) return {low};
  if (!(high > low)) throw ArgumentError("sweep needs high > low");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    out[i] = low + (high - low) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return out;
}

Eigen::MatrixXd build_hamiltonian(const SchwingerConfig& config) {
  config.validate();
  const std::size_t n = config.n_sites;
  const std::size_t dim = std::size_t{1} << n;
  const double background = config.theta / (2.0 * std::numbers::pi);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                            static_cast<Eigen::Index>(dim));
  for (std::size_t b = 0; b < dim; ++b) {
    const auto bi = static_cast<Eigen::Index>(b);
    double electric = 0.0;
    double field = background;
    for (std::size_t link = 0; link + 1 < n; ++link) {
      field += site_charge(b, link);
      electric += field * field;
    }
    double mass = 0.0;
    for (std::size_t site = 0; site < n; ++site) mass += stagger(site) * spin_z(b, site);
    h(bi, bi) = config.J * electric + 0.5 * config.m * mass;

    // (XX + YY) swaps antiparallel neighbours with amplitude 2.
    for (std::size_t site = 0; site + 1 < n; ++site) {
      const bool a = ((b >> site) & 1U) != 0U;
      const bool c = ((b >> (site + 1)) & 1U) != 0U;
      if (a != c) {
        const std::size_t flipped = b ^ (std::size_t{3} << site);
        h(static_cast<Eigen::Index>(flipped), bi) += config.w;
      }
    }
  }
  return h;
}

double average_field(std::span<const Complex> psi, std::size_t n_sites,
                     FieldReading reading) {
  if (n_sites < 2 || psi.size() != (std::size_t{1} << n_sites)) {
    throw ShapeError("state length does not match 2^n_sites");
  }
  double norm = 0.0;
  for (const Complex& a : psi) norm += std::norm(a);
  if (std::abs(norm - 1.0) > 1e-8) {
    throw ArgumentError("average_field expects a normalized state, |psi|^2 = " +
                        std::to_string(norm));
  }
  double acc = 0.0;
  for (std::size_t b = 0; b < psi.size(); ++b) {
    const double p = std::norm(psi[b]);
    if (p == 0.0) continue;
    double value = 0.0;
    if (reading == FieldReading::kLinkAverage) {
      double field = 0.0;
      for (std::size_t link = 0; link + 1 < n_sites; ++link) {
        field += site_charge(b, link);
        value += field;
      }
      value /= static_cast<double>(n_sites - 1);
    } else {
      for (std::size_t i = 0; i < n_sites; ++i) value += site_charge(b, i);
    }
    acc += p * value;
  }
  return acc;
}

int field_label(double avg_field, double tolerance) {
  return std::abs(avg_field) <= tolerance ? 0 : 1;
}

std::vector<LabeledQuantumState> ground_states(const SchwingerConfig& config) {
  config.validate();
  if (config.mass_sweep.empty()) throw ArgumentError("mass_sweep is empty");
  const std::size_t points = config.mass_sweep.size();
  const std::size_t keep = config.states_per_point;
  std::vector<LabeledQuantumState> out(points * keep);

  const auto np = static_cast<std::int64_t>(points);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t p = 0; p < np; ++p) {
    SchwingerConfig local = config;
    local.m = config.mass_sweep[p] * config.g;
    const Eigen::MatrixXd h = build_hamiltonian(local);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    const Eigen::VectorXd& evals = solver.eigenvalues();
    const Eigen::MatrixXd& evecs = solver.eigenvectors();
    for (std::size_t k = 0; k < keep; ++k) {
      const auto ki = static_cast<Eigen::Index>(k);
      LabeledQuantumState s;
      s.n_sites = config.n_sites;
      s.m_over_g = config.mass_sweep[p];
      s.theta = config.theta;
      s.level = k;
      s.energy = evals(ki);
      const Eigen::VectorXd v = evecs.col(ki);
      s.residual = (h * v - s.energy * v).norm();
      s.amplitudes.resize(static_cast<std::size_t>(v.size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) s.amplitudes[i] = Complex{v(i), 0.0};
      s.avg_field = average_field(s.amplitudes, config.n_sites, config.reading);
      s.link_field = average_field(s.amplitudes, config.n_sites, FieldReading::kLinkAverage);
      s.label = field_label(s.avg_field, config.label_tolerance);
      const bool below = k > 0 && evals(ki) - evals(ki - 1) < config.degeneracy_gap;
      const bool above = ki + 1 < evals.size() && evals(ki + 1) - evals(ki) < config.degeneracy_gap;
      s.degenerate = below || above;
      out[static_cast<std::size_t>(p) * keep + k] = std::move(s);
    }
  }
  return out;
}

}  // namespace qsom
