#include "qsom/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "qsom/errors.hpp"
#include "qsom/io.hpp"
#include "qsom/metrics.hpp"
#include "qsom/random.hpp"
#include "qsom/schwinger.hpp"
#include "qsom/som.hpp"

namespace qsom::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config plumbing ---------------------------------------------------------

json::json_pointer pointer(const std::string& dotted) {
  std::string p = "/" + dotted;
  for (char& c : p) {
    if (c == '.') c = '/';
  }
  return json::json_pointer(p);
}

void collect_leaves(const json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object() && !j.empty()) {
    for (const auto& [k, v] : j.items()) {
      collect_leaves(v, prefix.empty() ? k : prefix + "." + k, out);
    }
  } else {
    out.push_back(prefix);
  }
}

// Rejects keys the command does not understand, so typos do not silently fall
// back to defaults.
void check_known(const json& cfg, const std::set<std::string>& known) {
  if (!cfg.is_object()) throw ArgumentError("config must be a JSON object");
  std::vector<std::string> leaves;
  for (const auto& [k, v] : cfg.items()) collect_leaves(v, k, leaves);
  for (const std::string& leaf : leaves) {
    if (!known.contains(leaf)) throw ArgumentError("config field '" + leaf + "': unknown key");
  }
}

template <class T>
T field(const json& cfg, const std::string& path, T fallback) {
  const auto ptr = pointer(path);
  if (!cfg.contains(ptr)) return fallback;
  const json& v = cfg.at(ptr);
  const auto bad = [&](const char* what) {
    return ArgumentError("config field '" + path + "': expected " + what + ", got " + v.dump());
  };
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw bad("a boolean");
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw bad("an integer");
    if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) throw bad("a non-negative integer");
    return v.get<T>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw bad("a number");
    return v.get<T>();
  } else {
    if (!v.is_string()) throw bad("a string");
    return v.get<T>();
  }
}

std::string require_path(const json& cfg, const std::string& key) {
  const std::string p = field<std::string>(cfg, key, "");
  if (p.empty()) throw ArgumentError("config field '" + key + "': required");
  return p;
}

// Flag overrides are recorded as json patches so that file values, env and
// flags all pass through the same validation.
class Overrides {
 public:
  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& path,
           const std::string& help) {
    auto slot = std::make_shared<std::optional<T>>();
    app->add_option_function<T>(flag, [slot](const T& v) { *slot = v; }, help);
    patches_.push_back([slot, path](json& cfg) {
      if (*slot) cfg[pointer(path)] = **slot;
    });
  }

  void apply(json& cfg) const {
    for (const auto& p : patches_) p(cfg);
  }

 private:
  std::vector<std::function<void(json&)>> patches_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArgumentError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw ArgumentError("config file " + path + " must hold a JSON object");
  return cfg;
}

// Seed precedence: flag > QSOM_SEED > config file.
void apply_env_seed(json& cfg, bool flag_given) {
  if (flag_given) return;
  const char* env = std::getenv("QSOM_SEED");
  if (env == nullptr || *env == '\0') return;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ArgumentError("QSOM_SEED must be a non-negative integer, got '" + s + "'");
  }
  cfg["seed"] = v;
}

// ---- data -----------------------------------------------------------------------

struct Dataset {
  std::vector<std::vector<double>> features;  // classical view
  std::vector<DataSample> samples;            // quantum view
  std::vector<int> labels;
  std::vector<std::string> label_names;
  std::size_t n_qubits = 0;
};

Dataset load_data(const std::string& kind, const fs::path& path) {
  Dataset d;
  if (kind == "iris") {
    LabeledTable t = load_feature_csv(path, 4);
    scale_to_unit_interval(t.features);
    d.features = std::move(t.features);
    d.labels = std::move(t.labels);
    d.label_names = std::move(t.label_names);
    d.n_qubits = 4;
    for (const auto& f : d.features) d.samples.emplace_back(f);
  } else if (kind == "schwinger") {
    for (LabeledQuantumState& s : load_dataset(path)) {
      if (d.n_qubits != 0 && d.n_qubits != s.n_sites) {
        throw IoError(path.string() + ": records with mixed n_sites");
      }
      d.n_qubits = s.n_sites;
      std::vector<double> re;
      re.reserve(s.amplitudes.size());
      for (const Complex& a : s.amplitudes) re.push_back(a.real());
      d.features.push_back(std::move(re));
      d.samples.emplace_back(Statevector(std::move(s.amplitudes)));
      d.labels.push_back(s.label);
    }
  } else {
    throw ArgumentError("config field 'dataset': expected iris|schwinger, got '" + kind + "'");
  }
  return d;
}

KernelEstimator make_estimator(const TrainedMap& map) {
  return KernelEstimator(map.feature_map, map.mode, map.feature_map);
}

std::vector<std::size_t> assign(const TrainedMap& map, const Dataset& data) {
  if (data.features.empty()) return {};
  switch (map.trainer) {
    case TrainerKind::kClassical:
    case TrainerKind::kKernelized:
      if (data.features.front().size() != map.grid.dim()) {
        throw ArgumentError("data has " + std::to_string(data.features.front().size()) +
                            " features, map expects " + std::to_string(map.grid.dim()));
      }
      if (map.trainer == TrainerKind::kClassical) return infer_euclidean(map.grid, data.features);
      return infer_kernelized(map.grid, data.features, RbfKernel(map.rbf_bandwidth));
    case TrainerKind::kQuantum: {
      if (data.n_qubits != map.feature_map.n_features) {
        throw ArgumentError("data has " + std::to_string(data.n_qubits) + " qubits, map expects " +
                            std::to_string(map.feature_map.n_features));
      }
      KernelEstimator est = make_estimator(map);
      return infer_quantum(map.grid, est, data.samples);
    }
  }
  return {};
}

EstimatorMode parse_mode(const json& cfg, std::uint64_t seed) {
  const std::string mode = field<std::string>(cfg, "estimator.mode", "exact");
  if (mode == "exact") return ExactMode{};
  if (mode == "shots") {
    const auto shots = field<std::uint64_t>(cfg, "estimator.shots", 1024);
    if (shots == 0) throw ArgumentError("config field 'estimator.shots': must be >= 1");
    return ShotsMode{shots, field<std::uint64_t>(cfg, "estimator.seed", seed)};
  }
  throw ArgumentError("config field 'estimator.mode': expected exact|shots, got '" + mode + "'");
}

// ---- commands -----------------------------------------------------------------

int cmd_train(const json& cfg, std::ostream& out) {
  check_known(cfg, {"data", "dataset", "trainer", "seed", "grid.rows", "grid.cols",
                    "schedule.alpha0", "schedule.sigma0", "schedule.iterations",
                    "schedule.sigma_floor", "init.low", "init.high", "feature_map.reps",
                    "estimator.mode", "estimator.shots", "estimator.seed", "h_cutoff",
                    "rbf_bandwidth", "out", "record_out"});
  TrainedMap map;
  map.dataset_kind = field<std::string>(cfg, "dataset", "iris");
  map.trainer = parse_trainer(field<std::string>(cfg, "trainer", "quantum"));
  map.seed = field<std::uint64_t>(cfg, "seed", 0);
  map.schedule.alpha0 = field<double>(cfg, "schedule.alpha0", 1.0);
  map.schedule.sigma0 = field<double>(cfg, "schedule.sigma0", 5.0);
  map.schedule.total_iters = field<std::size_t>(cfg, "schedule.iterations", 500);
  map.schedule.sigma_floor = field<double>(cfg, "schedule.sigma_floor", 0.1);
  map.schedule.validate();
  map.feature_map.reps = field<std::size_t>(cfg, "feature_map.reps", 2);
  map.mode = parse_mode(cfg, map.seed);
  map.h_cutoff = field<double>(cfg, "h_cutoff", kDefaultHCutoff);
  map.rbf_bandwidth = field<double>(cfg, "rbf_bandwidth", 1.0);
  const auto rows = field<std::size_t>(cfg, "grid.rows", 6);
  const auto cols = field<std::size_t>(cfg, "grid.cols", 6);
  const double low = field<double>(cfg, "init.low", -std::numbers::pi / 2);
  const double high = field<double>(cfg, "init.high", std::numbers::pi / 2);
  const fs::path map_out = field<std::string>(cfg, "out", "qsom_map.json");
  const fs::path record_out = field<std::string>(cfg, "record_out", "qsom_record.json");
  if (map.feature_map.reps < 1) throw ArgumentError("config field 'feature_map.reps': must be >= 1");
  if (!(map.h_cutoff >= 0.0)) throw ArgumentError("config field 'h_cutoff': must be >= 0");
  if (!(map.rbf_bandwidth > 0.0)) throw ArgumentError("config field 'rbf_bandwidth': must be > 0");
  if (rows == 0 || cols == 0) throw ArgumentError("config field 'grid': rows and cols must be >= 1");

  // Labels stay in `data` and never reach the trainers below.
  const Dataset data = load_data(map.dataset_kind, require_path(cfg, "data"));
  if (data.features.empty()) throw ArgumentError("dataset is empty; nothing to train on");
  map.feature_map.n_features = data.n_qubits;

  const std::size_t dim =
      map.trainer == TrainerKind::kQuantum ? data.n_qubits : data.features.front().size();
  map.grid = SomGrid(rows, cols, dim);
  init_weights(map.grid, low, high, derive_seed(map.seed, 0));
  const std::uint64_t train_seed = derive_seed(map.seed, 1);

  TrainingRecord record;
  switch (map.trainer) {
    case TrainerKind::kClassical:
      record = train_classical(map.grid, data.features, map.schedule, train_seed);
      break;
    case TrainerKind::kKernelized:
      record = train_kernelized(map.grid, data.features, map.schedule,
                                RbfKernel(map.rbf_bandwidth), train_seed);
      break;
    case TrainerKind::kQuantum: {
      KernelEstimator est = make_estimator(map);
      record = train_quantum(map.grid, data.samples, map.schedule, est, train_seed, map.h_cutoff);
      break;
    }
  }
  save_map(map, map_out);
  save_record(record, record_out);
  out << "trained " << to_string(map.trainer) << " map " << rows << "x" << cols << " on "
      << data.features.size() << " samples, " << record.steps.size() << " iterations";
  if (map.trainer == TrainerKind::kQuantum) {
    out << ", circuit evaluations " << record.bmu_evaluations << " (bmu) + "
        << record.gradient_evaluations << " (gradient)";
  }
  out << "\nmap: " << map_out.string() << "\nrecord: " << record_out.string() << "\n";
  return kExitOk;
}

int cmd_infer(const json& cfg, std::ostream& out) {
  check_known(cfg, {"map", "data", "dataset", "out", "seed"});
  const TrainedMap map = load_map(require_path(cfg, "map"));
  const std::string kind = field<std::string>(cfg, "dataset", map.dataset_kind);
  const fs::path out_path = field<std::string>(cfg, "out", "assignments.csv");
  const Dataset data = load_data(kind, require_path(cfg, "data"));
  const std::vector<std::size_t> bmus = assign(map, data);

  std::vector<AssignmentRow> rows;
  rows.reserve(bmus.size());
  for (std::size_t i = 0; i < bmus.size(); ++i) {
    const auto [r, c] = map.grid.coords(bmus[i]);
    AssignmentRow row{i, r, c, std::nullopt};
    if (!data.labels.empty()) row.label = data.labels[i];
    rows.push_back(row);
  }
  write_assignments(rows, out_path);
  out << "assigned " << rows.size() << " samples\nassignments: " << out_path.string() << "\n";
  return kExitOk;
}

FieldReading parse_reading(const std::string& s) {
  if (s == "double-sum") return FieldReading::kPrintedDoubleSum;
  if (s == "link-average") return FieldReading::kLinkAverage;
  throw ArgumentError("config field 'reading': expected double-sum|link-average, got '" + s + "'");
}

int cmd_generate_schwinger(const json& cfg, std::ostream& out) {
  check_known(cfg, {"n_sites", "J", "w", "g", "theta", "sweep.low", "sweep.high", "sweep.points",
                    "states_per_point", "reading", "label_tolerance", "degeneracy_gap", "out",
                    "seed"});
  SchwingerConfig c;
  c.n_sites = field<std::size_t>(cfg, "n_sites", 4);
  c.J = field<double>(cfg, "J", 1.0);
  c.w = field<double>(cfg, "w", 1.0);
  c.g = field<double>(cfg, "g", 1.0);
  c.theta = field<double>(cfg, "theta", std::numbers::pi);
  c.states_per_point = field<std::size_t>(cfg, "states_per_point", 2);
  c.reading = parse_reading(field<std::string>(cfg, "reading", "double-sum"));
  c.label_tolerance = field<double>(cfg, "label_tolerance", 1e-8);
  c.degeneracy_gap = field<double>(cfg, "degeneracy_gap", 1e-10);
  c.mass_sweep = linear_sweep(field<double>(cfg, "sweep.low", 0.0),
                              field<double>(cfg, "sweep.high", 1.0),
                              field<std::size_t>(cfg, "sweep.points", 20));
  const fs::path out_path = field<std::string>(cfg, "out", "schwinger.json");
  c.validate();

  const std::vector<LabeledQuantumState> states = ground_states(c);
  std::size_t counts[2] = {0, 0};
  for (const LabeledQuantumState& s : states) {
    if (s.label != field_label(s.avg_field, c.label_tolerance)) {
      throw std::logic_error("label does not match its order parameter");
    }
    ++counts[s.label];
  }
  export_dataset(states, out_path);
  out << "generated " << states.size() << " states (" << counts[0] << " class 0, " << counts[1]
      << " class 1)\ndataset: " << out_path.string() << "\n";
  return kExitOk;
}

// Fills `report[name]` with fn() or records why the metric is undefined.
template <class Fn>
void metric(json& report, json& errors, const std::string& name, Fn&& fn) {
  try {
    report[name] = fn();
  } catch (const std::logic_error& e) {
    report[name] = nullptr;
    errors[name] = e.what();
  }
}

int cmd_metrics(const json& cfg, std::ostream& out) {
  check_known(cfg, {"assignments", "map", "data", "dataset", "space", "adjacency", "out", "seed"});
  const std::vector<AssignmentRow> rows = read_assignments(require_path(cfg, "assignments"));
  const std::string space = field<std::string>(cfg, "space", "grid");
  const std::string adjacency_name = field<std::string>(cfg, "adjacency", "eight");
  const std::string out_path = field<std::string>(cfg, "out", "");
  if (space != "grid" && space != "feature") {
    throw ArgumentError("config field 'space': expected grid|feature, got '" + space + "'");
  }
  if (adjacency_name != "eight" && adjacency_name != "four") {
    throw ArgumentError("config field 'adjacency': expected eight|four");
  }
  const Adjacency adjacency = adjacency_name == "four" ? Adjacency::kFour : Adjacency::kEight;

  std::optional<TrainedMap> map;
  if (!field<std::string>(cfg, "map", "").empty()) map = load_map(field<std::string>(cfg, "map", ""));
  std::optional<Dataset> data;
  if (!field<std::string>(cfg, "data", "").empty()) {
    const std::string kind = field<std::string>(cfg, "dataset", map ? map->dataset_kind : "iris");
    data = load_data(kind, field<std::string>(cfg, "data", ""));
  }

  std::size_t cols = 0;
  for (const AssignmentRow& r : rows) cols = std::max(cols, r.col + 1);
  if (map) cols = map->grid.cols();

  LabeledAssignment a;
  PointSet points;
  bool labeled = !rows.empty();
  for (const AssignmentRow& r : rows) {
    labeled = labeled && r.label.has_value();
    a.bmus.push_back(r.row * cols + r.col);
    if (r.label) a.labels.push_back(*r.label);
    if (space == "grid") {
      points.push_back({static_cast<double>(r.row), static_cast<double>(r.col)});
    } else {
      if (!data) throw ArgumentError("space=feature needs 'data'");
      if (r.sample_id >= data->features.size()) throw ArgumentError("sample_id out of range for data");
      points.push_back(data->features[r.sample_id]);
    }
  }

  json report = json::object();
  json errors = json::object();
  report["n_samples"] = rows.size();
  report["space"] = space;
  const auto need_labels = [&] {
    if (rows.empty()) throw ArgumentError("no samples");
    if (!labeled) throw ArgumentError("assignments carry no labels");
  };
  metric(report, errors, "fowlkes_mallows", [&] {
    need_labels();
    const std::vector<int> majority = majority_labels(a);
    return fowlkes_mallows(a.labels, majority);
  });
  metric(report, errors, "purity", [&] {
    need_labels();
    return map_purity(a);
  });
  metric(report, errors, "silhouette", [&] {
    need_labels();
    return silhouette(points, a.labels);
  });
  metric(report, errors, "davies_bouldin", [&] {
    need_labels();
    return davies_bouldin(points, a.labels);
  });
  metric(report, errors, "calinski_harabasz", [&] {
    need_labels();
    return calinski_harabasz(points, a.labels);
  });
  if (map && data) {
    const bool quantum = map->trainer == TrainerKind::kQuantum;
    metric(report, errors, "quantization_error", [&] {
      if (!quantum) return quantization_error(map->grid, data->features);
      KernelEstimator est = make_estimator(*map);
      return quantization_error(map->grid, est, data->samples);
    });
    metric(report, errors, "topographic_error", [&] {
      if (!quantum) return topographic_error(map->grid, data->features, adjacency);
      KernelEstimator est = make_estimator(*map);
      return topographic_error(map->grid, est, data->samples, adjacency);
    });
  }
  if (!errors.empty()) report["errors"] = errors;

  if (out_path.empty()) {
    out << report.dump(2) << "\n";
  } else {
    write_json(report, out_path);
    out << "metrics: " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_export_plotdata(const json& cfg, std::ostream& out) {
  check_known(cfg, {"assignments", "map", "grid.rows", "grid.cols", "out", "seed"});
  const std::vector<AssignmentRow> rows = read_assignments(require_path(cfg, "assignments"));
  std::size_t n_rows = field<std::size_t>(cfg, "grid.rows", 0);
  std::size_t n_cols = field<std::size_t>(cfg, "grid.cols", 0);
  if (!field<std::string>(cfg, "map", "").empty()) {
    const TrainedMap map = load_map(field<std::string>(cfg, "map", ""));
    n_rows = map.grid.rows();
    n_cols = map.grid.cols();
  }
  if (n_rows == 0 || n_cols == 0) {
    throw ArgumentError("grid size unknown: give 'map' or 'grid.rows' and 'grid.cols'");
  }
  const fs::path out_path = field<std::string>(cfg, "out", "plotdata.csv");

  std::set<int> labels;
  bool unlabeled = false;
  for (const AssignmentRow& r : rows) {
    if (r.row >= n_rows || r.col >= n_cols) {
      throw ArgumentError("assignment (" + std::to_string(r.row) + ", " + std::to_string(r.col) +
                          ") lies outside the " + std::to_string(n_rows) + "x" +
                          std::to_string(n_cols) + " grid");
    }
    if (r.label) labels.insert(*r.label); else unlabeled = true;
  }
  std::vector<std::map<int, std::size_t>> counts(n_rows * n_cols);
  std::vector<std::size_t> blank(n_rows * n_cols, 0);
  for (const AssignmentRow& r : rows) {
    const std::size_t cell = r.row * n_cols + r.col;
    if (r.label) ++counts[cell][*r.label]; else ++blank[cell];
  }

  std::ofstream f(out_path);
  if (!f) throw IoError("cannot open " + out_path.string() + " for writing");
  f << "row,col,total";
  for (int l : labels) f << ",label_" << l;
  if (unlabeled) f << ",unlabeled";
  f << '\n';
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    std::size_t total = blank[cell];
    for (const auto& [l, n] : counts[cell]) total += n;
    f << cell / n_cols << ',' << cell % n_cols << ',' << total;
    for (int l : labels) {
      const auto it = counts[cell].find(l);
      f << ',' << (it == counts[cell].end() ? 0 : it->second);
    }
    if (unlabeled) f << ',' << blank[cell];
    f << '\n';
  }
  if (!f) throw IoError("failed writing " + out_path.string());
  out << "plot data: " << out_path.string() << " (" << counts.size() << " neurons)\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum self-organizing maps: training, inference, Schwinger data, metrics"};
  app.name("qsom");
  app.require_subcommand(1);

  struct Command {
    CLI::App* app;
    std::function<int(const json&, std::ostream&)> run;
    Overrides overrides;
    std::string config;
    std::optional<std::uint64_t> seed;
  };
  std::vector<std::unique_ptr<Command>> commands;
  const auto add = [&](const std::string& name, const std::string& help, auto fn) {
    auto c = std::make_unique<Command>();
    c->app = app.add_subcommand(name, help);
    c->run = fn;
    c->app->add_option("--config", c->config, "JSON config file; flags override its values");
    Command* raw = c.get();
    c->app->add_option_function<std::uint64_t>(
        "--seed", [raw](const std::uint64_t& v) { raw->seed = v; },
        "Seed (overrides QSOM_SEED and the config file)");
    commands.push_back(std::move(c));
    return raw;
  };

  Command* train = add("train", "Train a map and write it with its per-iteration record", cmd_train);
  train->overrides.add<std::string>(train->app, "--data", "data", "Dataset file");
  train->overrides.add<std::string>(train->app, "--dataset", "dataset", "iris|schwinger");
  train->overrides.add<std::string>(train->app, "--trainer", "trainer", "quantum|classical|kernel");
  train->overrides.add<std::size_t>(train->app, "--rows", "grid.rows", "Grid rows");
  train->overrides.add<std::size_t>(train->app, "--cols", "grid.cols", "Grid columns");
  train->overrides.add<double>(train->app, "--alpha0", "schedule.alpha0", "Initial learning rate");
  train->overrides.add<double>(train->app, "--sigma0", "schedule.sigma0", "Initial neighbourhood width");
  train->overrides.add<std::size_t>(train->app, "--iterations", "schedule.iterations", "Training iterations");
  train->overrides.add<std::size_t>(train->app, "--reps", "feature_map.reps", "Feature-map repetitions");
  train->overrides.add<std::string>(train->app, "--estimator", "estimator.mode", "exact|shots");
  train->overrides.add<std::uint64_t>(train->app, "--shots", "estimator.shots", "Shots per circuit");
  train->overrides.add<double>(train->app, "--h-cutoff", "h_cutoff", "Skip neurons with h below this");
  train->overrides.add<std::string>(train->app, "--out", "out", "Map output file");
  train->overrides.add<std::string>(train->app, "--record-out", "record_out", "Training record file");

  Command* infer = add("infer", "Assign samples to their best matching units", cmd_infer);
  infer->overrides.add<std::string>(infer->app, "--map", "map", "Trained map file");
  infer->overrides.add<std::string>(infer->app, "--data", "data", "Dataset file");
  infer->overrides.add<std::string>(infer->app, "--dataset", "dataset", "iris|schwinger");
  infer->overrides.add<std::string>(infer->app, "--out", "out", "Assignments CSV");

  Command* gen = add("generate-schwinger", "Diagonalize the lattice Schwinger model over a mass sweep",
                     cmd_generate_schwinger);
  gen->overrides.add<std::size_t>(gen->app, "--n-sites", "n_sites", "Lattice sites (even, <= 10)");
  gen->overrides.add<double>(gen->app, "--theta", "theta", "Topological angle");
  gen->overrides.add<double>(gen->app, "--m-low", "sweep.low", "Lowest m/g");
  gen->overrides.add<double>(gen->app, "--m-high", "sweep.high", "Highest m/g");
  gen->overrides.add<std::size_t>(gen->app, "--points", "sweep.points", "Sweep points");
  gen->overrides.add<std::size_t>(gen->app, "--states", "states_per_point", "Eigenstates per point");
  gen->overrides.add<std::string>(gen->app, "--reading", "reading", "double-sum|link-average");
  gen->overrides.add<std::string>(gen->app, "--out", "out", "Dataset output file");

  Command* met = add("metrics", "Clustering and map-quality report", cmd_metrics);
  met->overrides.add<std::string>(met->app, "--assignments", "assignments", "Assignments CSV");
  met->overrides.add<std::string>(met->app, "--map", "map", "Trained map (enables QE/TE)");
  met->overrides.add<std::string>(met->app, "--data", "data", "Dataset file (enables QE/TE)");
  met->overrides.add<std::string>(met->app, "--dataset", "dataset", "iris|schwinger");
  met->overrides.add<std::string>(met->app, "--space", "space", "grid|feature");
  met->overrides.add<std::string>(met->app, "--adjacency", "adjacency", "eight|four");
  met->overrides.add<std::string>(met->app, "--out", "out", "Report file (default stdout)");

  Command* plot = add("export-plotdata", "Per-neuron label counts for plotting", cmd_export_plotdata);
  plot->overrides.add<std::string>(plot->app, "--assignments", "assignments", "Assignments CSV");
  plot->overrides.add<std::string>(plot->app, "--map", "map", "Trained map (gives grid size)");
  plot->overrides.add<std::size_t>(plot->app, "--rows", "grid.rows", "Grid rows");
  plot->overrides.add<std::size_t>(plot->app, "--cols", "grid.cols", "Grid columns");
  plot->overrides.add<std::string>(plot->app, "--out", "out", "Output CSV");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    for (const auto& c : commands) {
      if (!c->app->parsed()) continue;
      json cfg = load_config(c->config);
      c->overrides.apply(cfg);
      if (c->seed) cfg["seed"] = *c->seed;
      apply_env_seed(cfg, c->seed.has_value());
      return c->run(cfg, out);
    }
  } catch (const IoError& e) {
    err << "qsom: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "qsom: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const SizeError& e) {
    err << "qsom: size error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "qsom: config error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

int run(int argc, char** argv) {
  return run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace qsom::cli
