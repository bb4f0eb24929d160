#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qsom/errors.hpp"
#include "qsom/som.hpp"

using namespace qsom;

TEST_CASE("grid geometry") {
  SomGrid g(3, 4, 2);
  CHECK(g.size() == 12);
  CHECK(g.coords(7) == std::pair<std::size_t, std::size_t>{1, 3});
  CHECK(g.index(2, 1) == 9);
  CHECK(grid_distance(g, 0, 11) == doctest::Approx(std::sqrt(4.0 + 9.0)));
  CHECK(grid_distance(g, 5, 5) == 0.0);
  CHECK_THROWS_AS(g.coords(12), IndexError);
  CHECK_THROWS_AS(g.index(3, 0), IndexError);
  CHECK_THROWS_AS(SomGrid(0, 3, 2), ArgumentError);
  CHECK_THROWS_AS(g.set_weights({{1.0, 2.0}}), ShapeError);
}

TEST_CASE("neighbourhood and schedule") {
  CHECK(neighborhood(0.0, 1.3) == 1.0);
  CHECK(neighborhood(2.0, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(neighborhood(1.0, 0.0), ArgumentError);

  const Schedule s{1.0, 5.0, 500, 0.1};
  CHECK(s.alpha(0) == 1.0);
  CHECK(s.sigma(0) == 5.0);
  CHECK(s.alpha(500) == doctest::Approx(std::exp(-1.0)));
  for (std::size_t t = 0; t < 5000; ++t) {
    CHECK(s.alpha(t + 1) <= s.alpha(t));
    CHECK(s.sigma(t + 1) <= s.sigma(t));
    CHECK(s.sigma(t) >= 0.1);
  }
  CHECK_THROWS_AS(Schedule({0.0, 5.0, 10, 0.1}).validate(), ArgumentError);
}

TEST_CASE("weight init is seeded and in range") {
  SomGrid a(6, 6, 4);
  SomGrid b(6, 6, 4);
  init_weights(a, -std::numbers::pi / 2, std::numbers::pi / 2, 5);
  init_weights(b, -std::numbers::pi / 2, std::numbers::pi / 2, 5);
  CHECK(a == b);
  for (const auto& w : a.weights()) {
    for (double c : w) {
      CHECK(c >= -std::numbers::pi / 2);
      CHECK(c < std::numbers::pi / 2);
    }
  }
  CHECK_THROWS_AS(init_weights(a, 1.0, 1.0, 0), ArgumentError);
}

TEST_CASE("euclidean BMU breaks ties by lowest index") {
  SomGrid g(1, 3, 1);
  g.set_weights({{1.0}, {-1.0}, {3.0}});
  CHECK(find_bmu_euclidean(g, std::vector<double>{0.0}) == 0);
  CHECK(find_bmu_euclidean(g, std::vector<double>{2.9}) == 2);
  CHECK_THROWS_AS(find_bmu_euclidean(g, std::vector<double>{0.0, 1.0}), ShapeError);
}

TEST_CASE("classical update moves every weight by alpha h toward x") {
  SomGrid g(2, 2, 2);
  g.set_weights({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const SomGrid before = g;
  const std::vector<double> x{0.5, 0.5};
  update_classical(g, x, 0, 0.4, 1.0);
  for (std::size_t i = 0; i < 4; ++i) {
    const double step = 0.4 * neighborhood(grid_distance(g, i, 0), 1.0);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(g.weight(i)[c] ==
            doctest::Approx(before.weight(i)[c] + step * (x[c] - before.weight(i)[c])));
    }
  }
}

TEST_CASE("kernel derivatives match finite differences") {
  const RbfKernel rbf(0.8);
  const PolynomialKernel poly(1.0, 3);
  const std::vector<double> x{0.3, -0.2, 0.7};
  const std::vector<double> w{-0.1, 0.4, 0.2};
  const double h = 1e-6;
  for (const ClassicalKernel* k : {static_cast<const ClassicalKernel*>(&rbf),
                                   static_cast<const ClassicalKernel*>(&poly)}) {
    const auto cross = k->cross_gradient(x, w);
    const auto self = k->self_gradient(w);
    for (std::size_t j = 0; j < 3; ++j) {
      auto wp = w;
      auto wm = w;
      wp[j] += h;
      wm[j] -= h;
      CHECK(cross[j] == doctest::Approx((k->value(x, wp) - k->value(x, wm)) / (2 * h)).epsilon(1e-6));
      CHECK(self[j] ==
            doctest::Approx((k->value(wp, wp) - k->value(wm, wm)) / (2 * h)).epsilon(1e-6));
    }
  }
  CHECK(kernel_distance_sq(rbf, x, x) == doctest::Approx(0.0));
}

TEST_CASE("kernelized update with a linear kernel is the classical update") {
  // K = 0 + a.b gives ||x - w||^2 as feature distance and w += 2 alpha h (x - w).
  SomGrid a(2, 3, 2);
  init_weights(a, -1, 1, 4);
  SomGrid b = a;
  const PolynomialKernel linear(0.0, 1);
  const std::vector<double> x{0.2, -0.6};
  update_kernelized(a, x, 4, 0.3, 1.5, linear);
  update_classical(b, x, 4, 0.6, 1.5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t c = 0; c < 2; ++c) CHECK(a.weight(i)[c] == doctest::Approx(b.weight(i)[c]));
  }
  CHECK(find_bmu_kernelized(a, x, linear) == find_bmu_euclidean(a, x));
}

TEST_CASE("quantum BMU: parallel, serial and direct argmax agree") {
  const FeatureMapConfig map{4, 2};
  KernelEstimator est(map);
  SomGrid g(4, 5, 4);
  init_weights(g, -std::numbers::pi / 2, std::numbers::pi / 2, 9);
  Rng rng(10);
  for (int i = 0; i < 10; ++i) {
    const auto x = oracle::random_vector(rng, 4, -1, 1);
    const Statevector p = est.prepare(x);
    const BmuMatch par = match_quantum(g, est, p);
    const BmuMatch ser = match_quantum_serial(g, est, p);
    CHECK(par.index == ser.index);
    CHECK(par.fidelity == ser.fidelity);
    std::size_t best = 0;
    double best_k = -1;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const double k = oracle::fidelity(oracle::feature_state(x, 2),
                                        oracle::feature_state({g.weight(n).begin(), g.weight(n).end()}, 2));
      if (k > best_k + 1e-12) {
        best_k = k;
        best = n;
      }
    }
    CHECK(par.index == best);
  }
  est.reset_counter();
  find_bmu_quantum(g, est, DataSample{std::vector<double>{0.1, 0.2, 0.3, 0.4}});
  CHECK(est.evaluations() == g.size());
}

TEST_CASE("quantum update is gradient ascent on the fidelity") {
  const FeatureMapConfig map{4, 2};
  KernelEstimator est(map);
  SomGrid g(3, 3, 4);
  init_weights(g, -std::numbers::pi / 2, std::numbers::pi / 2, 12);
  const SomGrid before = g;
  const std::vector<double> x{0.4, -0.1, 0.8, -0.5};
  const Statevector p = est.prepare(x);
  est.reset_counter();
  const std::size_t updated = update_quantum(g, p, 4, 0.5, 1.0, est, 1e-3);
  CHECK(updated == 9);
  CHECK(est.evaluations() == 9 * est.gradient_cost());
  for (std::size_t i = 0; i < 9; ++i) {
    KernelEstimator ref(map);
    const auto grad = ref.gradient(x, before.weight(i));
    const double step = 2 * 0.5 * neighborhood(grid_distance(g, i, 4), 1.0);
    for (std::size_t c = 0; c < 4; ++c) {
      CHECK(g.weight(i)[c] == doctest::Approx(before.weight(i)[c] + step * grad[c]).epsilon(1e-12));
    }
  }

  // A tiny step increases the BMU fidelity.
  SomGrid small = before;
  update_quantum(small, p, 4, 1e-3, 0.5, est, 1e-3);
  CHECK(est.value(p, small.weight(4)) > est.value(p, before.weight(4)));

  // Narrow neighbourhood: only the BMU passes the cutoff.
  SomGrid narrow = before;
  CHECK(update_quantum(narrow, p, 4, 0.5, 0.1, est, 1e-3) == 1);
  CHECK(update_quantum(narrow, p, 4, 0.0, 1.0, est, 1e-3) == 0);
}

TEST_CASE("training is reproducible and records every iteration") {
  const FeatureMapConfig map{4, 1};
  Rng rng(13);
  std::vector<DataSample> data;
  for (int i = 0; i < 12; ++i) data.emplace_back(oracle::random_vector(rng, 4, -1, 1));
  const Schedule sched{1.0, 2.0, 40, 0.1};

  SomGrid a(3, 3, 4);
  init_weights(a, -1.5, 1.5, 1);
  SomGrid b = a;
  KernelEstimator ea(map);
  KernelEstimator eb(map);
  const TrainingRecord ra = train_quantum(a, data, sched, ea, 77);
  const TrainingRecord rb = train_quantum(b, data, sched, eb, 77);
  CHECK(a == b);
  CHECK(ra == rb);
  CHECK(ra.steps.size() == 40);
  CHECK(ra.bmu_evaluations == 40 * 9);
  CHECK(ra.bmu_evaluations + ra.gradient_evaluations == ea.evaluations());
  CHECK(ra.steps[3].alpha == sched.alpha(3));

  KernelEstimator shots_a(map, ShotsMode{64, 5});
  KernelEstimator shots_b(map, ShotsMode{64, 5});
  SomGrid c(3, 3, 4);
  init_weights(c, -1.5, 1.5, 1);
  SomGrid d = c;
  train_quantum(c, data, sched, shots_a, 3);
  train_quantum(d, data, sched, shots_b, 3);
  CHECK(c == d);

  SomGrid empty(2, 2, 4);
  CHECK_THROWS_AS(train_quantum(empty, std::span<const DataSample>{}, sched, ea, 1), ArgumentError);
}

TEST_CASE("inference counts N times k evaluations") {
  const FeatureMapConfig map{4, 2};
  KernelEstimator est(map);
  SomGrid g(2, 3, 4);
  init_weights(g, -1, 1, 2);
  Rng rng(14);
  std::vector<DataSample> data;
  for (int i = 0; i < 7; ++i) data.emplace_back(oracle::random_vector(rng, 4, -1, 1));
  const auto bmus = infer_quantum(g, est, data);
  CHECK(bmus.size() == 7);
  CHECK(est.evaluations() == 7 * 6);
  for (std::size_t i = 0; i < 7; ++i) CHECK(bmus[i] == find_bmu_quantum(g, est, data[i]));
}

TEST_CASE("classical training reduces quantization error on separated blobs") {
  Rng rng(21);
  std::vector<std::vector<double>> data;
  for (int c = 0; c < 3; ++c) {
    for (int i = 0; i < 30; ++i) data.push_back({c * 3.0 + uniform(rng, -0.3, 0.3), uniform(rng, -0.3, 0.3)});
  }
  SomGrid g(4, 4, 2);
  init_weights(g, -1, 7, 3);
  const auto qe = [&] {
    double acc = 0;
    for (const auto& x : data) {
      const auto w = g.weight(find_bmu_euclidean(g, x));
      acc += std::hypot(x[0] - w[0], x[1] - w[1]);
    }
    return acc / data.size();
  };
  const double before = qe();
  train_classical(g, data, {0.5, 2.0, 400, 0.1}, 4);
  CHECK(qe() < 0.5 * before);
}
