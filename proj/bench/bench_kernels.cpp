// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to taste.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "qsom/featuremap.hpp"
#include "qsom/kernel.hpp"
#include "qsom/random.hpp"
#include "qsom/som.hpp"
#include "qsom/statevector.hpp"

namespace {

double seconds(const std::function<void()>& fn, int repeats) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < repeats; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %10.4f ms   omp %10.4f ms   speedup %5.2fx\n", name, serial * 1e3,
              parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
  using namespace qsom;
  std::printf("threads: %d\n", omp_get_max_threads());

  {
    const std::size_t n = 18;
    Statevector s = zero_state(n);
    const Gate h = Gate::single(GateKind::H, 7);
    const Gate zz = Gate::pair(GateKind::RZZ, 3, 11, 0.37);
    const double ts = seconds([&] { apply_gate_serial(s, h); apply_gate_serial(s, zz); }, 10);
    const double tp = seconds([&] { apply_gate_inplace(s, h); apply_gate_inplace(s, zz); }, 10);
    report("gates, 18 qubits", ts, tp);
  }

  Rng rng(7);
  const FeatureMapConfig map{4, 2};
  SomGrid grid(12, 12, 4);
  init_weights(grid, -1.5, 1.5, 3);
  std::vector<double> x(4);
  for (double& v : x) v = uniform(rng, -1.0, 1.0);
  {
    KernelEstimator est(map);
    const Statevector prepared = est.prepare(x);
    const double ts = seconds([&] { match_quantum_serial(grid, est, prepared); }, 20);
    const double tp = seconds([&] { match_quantum(grid, est, prepared); }, 20);
    report("bmu search, 144 neurons", ts, tp);
  }
  {
    std::vector<std::vector<double>> pts(64, std::vector<double>(4));
    for (auto& p : pts)
      for (double& v : p) v = uniform(rng, -1.0, 1.0);
    const double ts = seconds([&] { gram_matrix_serial(map, pts); }, 5);
    const double tp = seconds([&] { gram_matrix(map, pts); }, 5);
    report("gram matrix 64x64", ts, tp);
  }
  return 0;
}
