// End-to-end acceptance checks. One PASS/FAIL line per criterion; the process
// exits non-zero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include <unistd.h>

#include "oracles.hpp"
#include "qsom/cli.hpp"
#include "qsom/featuremap.hpp"
#include "qsom/io.hpp"
#include "qsom/kernel.hpp"
#include "qsom/metrics.hpp"
#include "qsom/schwinger.hpp"
#include "qsom/som.hpp"

using namespace qsom;
namespace fs = std::filesystem;

namespace {

// Tolerances and thresholds, fixed here and nowhere else.
constexpr double kEmbedTol = 1e-9;
constexpr double kEmbedSeconds = 5.0;
constexpr double kKernelTol = 1e-10;
constexpr double kGradStep = 1e-5;
constexpr double kGradRelTol = 1e-4;
constexpr double kGramEigFloor = -1e-9;
constexpr double kSlopeLow = -0.6;
constexpr double kSlopeHigh = -0.4;
constexpr double kHCutoff = 1e-3;
constexpr double kIrisPurity = 0.80;
constexpr double kIrisFm = 0.60;
constexpr double kIrisSeconds = 600.0;
constexpr double kMonotoneSlack = 1e-6;
constexpr double kResidualTol = 1e-9;
constexpr double kSchwingerPurity = 0.85;
constexpr double kBaselineQeRatio = 0.5;
constexpr double kBaselineTe = 0.2;

const FeatureMapConfig kMap{4, 2};

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int qsom_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "qsom");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "qsom %s failed: %s\n", args[1].c_str(), err.str().c_str());
  return code;
}

struct MapScores {
  double purity = 0.0;
  double fm = 0.0;
};

MapScores score(const fs::path& assignments) {
  LabeledAssignment a;
  for (const AssignmentRow& r : read_assignments(assignments)) {
    a.bmus.push_back(r.row * 1000 + r.col);
    a.labels.push_back(r.label.value());
  }
  return {map_purity(a), fowlkes_mallows(a.labels, majority_labels(a))};
}

// ---------------------------------------------------------------------------

void feature_map_oracle() {
  Rng rng(101);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = oracle::random_vector(rng, 4, -std::numbers::pi, std::numbers::pi);
    worst = std::max(worst, (oracle::to_eigen(embed(kMap, x)) - oracle::feature_state(x, 2)).norm());
  }
  const double secs = elapsed(t0);
  verdict(1, worst <= kEmbedTol && secs < kEmbedSeconds,
          fmt("feature map vs matrix exponential: max |diff| = %.3e (<= %.0e), %.2f s (< %.0f s)",
              worst, kEmbedTol, secs, kEmbedSeconds));
}

void kernel_oracle() {
  Rng rng(102);
  KernelEstimator est(kMap);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto x = oracle::random_vector(rng, 4, -1, 1);
    const auto t = oracle::random_vector(rng, 4, -std::numbers::pi / 2, std::numbers::pi / 2);
    const double ref = oracle::fidelity(oracle::feature_state(x, 2), oracle::feature_state(t, 2));
    worst = std::max(worst, std::abs(est.value(x, t) - ref));
  }
  verdict(2, worst <= kKernelTol,
          fmt("exact kernel vs dense overlap: max |diff| = %.3e (<= %.0e)", worst, kKernelTol));
}

void gradient_check() {
  Rng rng(103);
  KernelEstimator est(kMap);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto x = oracle::random_vector(rng, 4, -1, 1);
    const auto t = oracle::random_vector(rng, 4, -std::numbers::pi / 2, std::numbers::pi / 2);
    const auto g = est.gradient(x, t);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      auto tp = t;
      auto tm = t;
      tp[j] += kGradStep;
      tm[j] -= kGradStep;
      const double fd = (est.value(x, tp) - est.value(x, tm)) / (2 * kGradStep);
      num += (g[j] - fd) * (g[j] - fd);
      den += fd * fd;
    }
    worst = std::max(worst, std::sqrt(num) / std::sqrt(den));
  }
  verdict(3, worst <= kGradRelTol,
          fmt("parameter shift vs central differences (h = %.0e): max relative error = %.3e (<= %.0e)",
              kGradStep, worst, kGradRelTol));
}

void gram_psd() {
  Rng rng(104);
  double lowest = 1.0;
  for (int draw = 0; draw < 20; ++draw) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < 10; ++i) pts.push_back(oracle::random_vector(rng, 4, -1, 1));
    const auto g = gram_matrix(kMap, pts);
    const Eigen::Map<const Eigen::MatrixXd> m(g.data(), 10, 10);
    lowest = std::min(lowest, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff());
  }
  verdict(4, lowest >= kGramEigFloor,
          fmt("10x10 Gram over 20 draws: min eigenvalue = %.3e (>= %.0e)", lowest, kGramEigFloor));
}

void shot_scaling() {
  // A pair with a mid-range kernel value so the binomial variance is not tiny.
  Rng rng(105);
  KernelEstimator exact(kMap);
  std::vector<double> x, t;
  double k = 0.0;
  do {
    x = oracle::random_vector(rng, 4, -1, 1);
    t = oracle::random_vector(rng, 4, -1, 1);
    k = exact.value(x, t);
  } while (k < 0.2 || k > 0.8);

  std::vector<double> log_shots, log_std;
  std::string detail;
  for (std::uint64_t shots : {100ULL, 1000ULL, 10000ULL}) {
    KernelEstimator est(kMap, ShotsMode{shots, 2024});
    const Statevector p = est.prepare(x);
    double sum = 0.0;
    double sq = 0.0;
    const int repeats = 200;
    for (int r = 0; r < repeats; ++r) {
      const double v = est.value(p, t);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / repeats;
    const double sd = std::sqrt((sq - repeats * mean * mean) / (repeats - 1));
    log_shots.push_back(std::log(static_cast<double>(shots)));
    log_std.push_back(std::log(sd));
    detail += fmt(" std(%llu) = %.4f;", static_cast<unsigned long long>(shots), sd);
  }
  const double mx = (log_shots[0] + log_shots[1] + log_shots[2]) / 3;
  const double my = (log_std[0] + log_std[1] + log_std[2]) / 3;
  double sxy = 0.0;
  double sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (log_shots[i] - mx) * (log_std[i] - my);
    sxx += (log_shots[i] - mx) * (log_shots[i] - mx);
  }
  const double slope = sxy / sxx;
  verdict(5, slope >= kSlopeLow && slope <= kSlopeHigh,
          fmt("K = %.3f,", k) + detail +
              fmt(" log-log slope = %.3f (in [%.1f, %.1f])", slope, kSlopeLow, kSlopeHigh));
}

void linear_cost() {
  const std::size_t k = 36;
  KernelEstimator probe(kMap);
  const double c = static_cast<double>(k * (1 + probe.gradient_cost()));
  bool pass = true;
  std::string detail;
  Rng rng(106);
  for (std::size_t n : {50, 100, 200}) {
    std::vector<DataSample> data;
    for (std::size_t i = 0; i < n; ++i) data.emplace_back(oracle::random_vector(rng, 4, -1, 1));
    SomGrid grid(6, 6, 4);
    init_weights(grid, -std::numbers::pi / 2, std::numbers::pi / 2, 7);
    KernelEstimator est(kMap);
    // One epoch: N iterations under the standard schedule.
    const Schedule sched{1.0, 5.0, 500, 0.1};
    SomGrid g = grid;
    std::uint64_t bmu = 0;
    std::uint64_t total = 0;
    {
      Rng pick(n);
      for (std::size_t t = 0; t < n; ++t) {
        const Statevector p = est.prepare(data[uniform_index(pick, n)]);
        const std::uint64_t before = est.evaluations();
        const BmuMatch m = match_quantum(g, est, p);
        bmu += est.evaluations() - before;
        update_quantum(g, p, m.index, sched.alpha(t), sched.sigma(t), est, kHCutoff);
      }
      total = est.evaluations();
    }
    const bool exact_bmu = bmu == n * k;
    const bool bounded = static_cast<double>(total) <= c * static_cast<double>(n);
    pass = pass && exact_bmu && bounded;
    detail += fmt(" N=%zu: bmu %llu (= N*k %s), total/N %.1f;", n,
                  static_cast<unsigned long long>(bmu), exact_bmu ? "yes" : "NO",
                  static_cast<double>(total) / static_cast<double>(n));
  }
  verdict(6, pass, "circuit evaluations per epoch:" + detail + fmt(" bound c = k(1+2P) = %.0f", c));
}

void iris_end_to_end(const fs::path& dir) {
  int good = 0;
  std::string detail;
  double worst_secs = 0.0;
  for (int seed : {1, 2, 3}) {
    const std::string s = std::to_string(seed);
    const fs::path map = dir / ("iris_" + s + ".json");
    const fs::path assign = dir / ("iris_" + s + ".csv");
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = qsom_cli({"train", "--data", QSOM_IRIS_CSV, "--dataset", "iris", "--trainer",
                             "quantum", "--rows", "6", "--cols", "6", "--alpha0", "1", "--sigma0",
                             "5", "--iterations", "500", "--reps", "2", "--estimator", "exact",
                             "--seed", s, "--out", map.string(), "--record-out",
                             (dir / ("iris_rec_" + s + ".json")).string()});
    const int rc2 = rc == 0 ? qsom_cli({"infer", "--map", map.string(), "--data", QSOM_IRIS_CSV,
                                        "--out", assign.string()})
                            : rc;
    worst_secs = std::max(worst_secs, elapsed(t0));
    if (rc2 != 0) {
      detail += " seed " + s + ": cli error;";
      continue;
    }
    const MapScores m = score(assign);
    const bool ok = m.purity >= kIrisPurity && m.fm >= kIrisFm;
    good += ok ? 1 : 0;
    detail += fmt(" seed %d: purity %.3f, FM %.3f;", seed, m.purity, m.fm);
  }
  verdict(7, good >= 2 && worst_secs < kIrisSeconds,
          fmt("Iris 6x6 quantum map, %d/3 seeds with purity >= %.2f and FM >= %.2f;", good,
              kIrisPurity, kIrisFm) +
              detail + fmt(" slowest run %.1f s", worst_secs));
}

void schwinger_dataset() {
  SchwingerConfig c;
  c.n_sites = 4;
  c.theta = std::numbers::pi;
  c.mass_sweep = linear_sweep(0.0, 1.0, 20);
  c.states_per_point = 2;
  const auto states = ground_states(c);
  bool classes[2] = {false, false};
  double residual = 0.0;
  double worst_drop = 0.0;
  double prev = -1e300;
  for (const auto& s : states) {
    classes[s.label] = true;
    residual = std::max(residual, s.residual);
    if (s.level == 0) {
      worst_drop = std::max(worst_drop, prev - s.avg_field);
      prev = s.avg_field;
    }
  }
  const bool pass = classes[0] && classes[1] && worst_drop <= kMonotoneSlack && residual <= kResidualTol;
  verdict(8, pass,
          fmt("N_s=4, theta=pi, %zu states: both classes %s, largest ground-state <E> drop %.2e "
              "(<= %.0e), max residual %.2e (<= %.0e)",
              states.size(), classes[0] && classes[1] ? "yes" : "NO", std::max(worst_drop, 0.0),
              kMonotoneSlack, residual, kResidualTol));
}

void schwinger_end_to_end(const fs::path& dir) {
  const fs::path data = dir / "schwinger.json";
  if (qsom_cli({"generate-schwinger", "--n-sites", "4", "--theta", std::to_string(std::numbers::pi),
                "--points", "20", "--states", "2", "--out", data.string()}) != 0) {
    verdict(9, false, "dataset generation failed");
    return;
  }
  int good = 0;
  std::string detail;
  for (int seed : {1, 2, 3}) {
    const std::string s = std::to_string(seed);
    const fs::path map = dir / ("sch_" + s + ".json");
    const fs::path assign = dir / ("sch_" + s + ".csv");
    if (qsom_cli({"train", "--dataset", "schwinger", "--data", data.string(), "--seed", s, "--out",
                  map.string(), "--record-out", (dir / ("sch_rec_" + s + ".json")).string()}) != 0 ||
        qsom_cli({"infer", "--map", map.string(), "--data", data.string(), "--out",
                  assign.string()}) != 0) {
      detail += " seed " + s + ": cli error;";
      continue;
    }
    const MapScores m = score(assign);
    good += m.purity >= kSchwingerPurity ? 1 : 0;
    detail += fmt(" seed %d: purity %.3f;", seed, m.purity);
  }
  verdict(9, good >= 2,
          fmt("Schwinger phases on a 6x6 quantum map, %d/3 seeds with purity >= %.2f;", good,
              kSchwingerPurity) +
              detail);
}

void classical_baseline() {
  Rng rng(110);
  std::normal_distribution<double> noise(0.0, 0.3);
  const double centers[3][2] = {{-2.0, -2.0}, {2.0, -1.0}, {0.0, 2.5}};
  std::vector<std::vector<double>> data;
  for (const auto& c : centers) {
    for (int i = 0; i < 100; ++i) data.push_back({c[0] + noise(rng), c[1] + noise(rng)});
  }
  SomGrid grid(6, 6, 2);
  init_weights(grid, -std::numbers::pi / 2, std::numbers::pi / 2, 111);
  const double before = quantization_error(grid, data);
  train_classical(grid, data, Schedule{1.0, 5.0, 500, 0.1}, 112);
  const double after = quantization_error(grid, data);
  const double te = topographic_error(grid, data);
  verdict(10, after <= kBaselineQeRatio * before && te <= kBaselineTe,
          fmt("Euclidean SOM on three blobs: QE %.3f -> %.3f (ratio %.3f <= %.1f), TE %.3f (<= %.1f)",
              before, after, after / before, kBaselineQeRatio, te, kBaselineTe));
}

void determinism(const fs::path& dir) {
  std::string files[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path map = dir / ("det_" + std::to_string(run) + ".json");
    if (qsom_cli({"train", "--data", QSOM_IRIS_CSV, "--seed", "42", "--estimator", "exact", "--out",
                  map.string(), "--record-out", (dir / "det_rec.json").string()}) != 0) {
      verdict(11, false, "training failed");
      return;
    }
    std::ifstream in(map, std::ios::binary);
    files[run].assign(std::istreambuf_iterator<char>(in), {});
  }
  verdict(11, !files[0].empty() && files[0] == files[1],
          fmt("two exact-mode runs, seed 42: map files %s (%zu bytes)",
              files[0] == files[1] ? "byte-identical" : "DIFFER", files[0].size()));
}

}  // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / ("qsom_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  feature_map_oracle();
  kernel_oracle();
  gradient_check();
  gram_psd();
  shot_scaling();
  linear_cost();
  iris_end_to_end(dir);
  schwinger_dataset();
  schwinger_end_to_end(dir);
  classical_baseline();
  determinism(dir);

  fs::remove_all(dir);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
