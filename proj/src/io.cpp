#include "qsom/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "qsom/errors.hpp"
#include "qsom/schwinger.hpp"

namespace qsom {

using nlohmann::json;

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

json mode_to_json(const EstimatorMode& mode) {
  if (const auto* s = std::get_if<ShotsMode>(&mode)) {
    return {{"mode", "shots"}, {"shots", s->shots}, {"seed", s->seed}};
  }
  return {{"mode", "exact"}};
}

EstimatorMode mode_from_json(const json& j) {
  const std::string m = j.at("mode").get<std::string>();
  if (m == "exact") return ExactMode{};
  if (m == "shots") {
    return ShotsMode{j.at("shots").get<std::uint64_t>(), j.value("seed", std::uint64_t{0})};
  }
  throw ArgumentError("unknown estimator mode '" + m + "'");
}

}  // namespace

const char* to_string(TrainerKind kind) {
  switch (kind) {
    case TrainerKind::kClassical: return "classical";
    case TrainerKind::kKernelized: return "kernel";
    case TrainerKind::kQuantum: return "quantum";
  }
  return "?";
}

TrainerKind parse_trainer(const std::string& name) {
  if (name == "classical") return TrainerKind::kClassical;
  if (name == "kernel" || name == "kernelized") return TrainerKind::kKernelized;
  if (name == "quantum") return TrainerKind::kQuantum;
  throw ArgumentError("unknown trainer '" + name + "' (classical|kernel|quantum)");
}

bool operator==(const TrainedMap& a, const TrainedMap& b) {
  return a.grid == b.grid && a.trainer == b.trainer && a.feature_map == b.feature_map &&
         a.schedule.alpha0 == b.schedule.alpha0 && a.schedule.sigma0 == b.schedule.sigma0 &&
         a.schedule.total_iters == b.schedule.total_iters &&
         a.schedule.sigma_floor == b.schedule.sigma_floor && a.seed == b.seed &&
         mode_to_json(a.mode) == mode_to_json(b.mode) && a.h_cutoff == b.h_cutoff &&
         a.rbf_bandwidth == b.rbf_bandwidth && a.dataset_kind == b.dataset_kind;
}

json to_json(const TrainedMap& map) {
  return {
      {"format", "qsom-map"},
      {"version", 1},
      {"rows", map.grid.rows()},
      {"cols", map.grid.cols()},
      {"dim", map.grid.dim()},
      {"trainer", to_string(map.trainer)},
      {"dataset_kind", map.dataset_kind},
      {"feature_map", {{"n_features", map.feature_map.n_features}, {"reps", map.feature_map.reps}}},
      {"schedule",
       {{"alpha0", map.schedule.alpha0},
        {"sigma0", map.schedule.sigma0},
        {"total_iters", map.schedule.total_iters},
        {"sigma_floor", map.schedule.sigma_floor}}},
      {"seed", map.seed},
      {"estimator", mode_to_json(map.mode)},
      {"h_cutoff", map.h_cutoff},
      {"rbf_bandwidth", map.rbf_bandwidth},
      {"weights", map.grid.weights()},
  };
}

TrainedMap trained_map_from_json(const json& j) {
  try {
    TrainedMap m;
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto dim = j.at("dim").get<std::size_t>();
    m.grid = SomGrid(rows, cols, dim);
    m.grid.set_weights(j.at("weights").get<std::vector<std::vector<double>>>());
    m.trainer = parse_trainer(j.at("trainer").get<std::string>());
    m.dataset_kind = j.value("dataset_kind", std::string("iris"));
    m.feature_map.n_features = j.at("feature_map").at("n_features").get<std::size_t>();
    m.feature_map.reps = j.at("feature_map").at("reps").get<std::size_t>();
    const json& s = j.at("schedule");
    m.schedule.alpha0 = s.at("alpha0").get<double>();
    m.schedule.sigma0 = s.at("sigma0").get<double>();
    m.schedule.total_iters = s.at("total_iters").get<std::size_t>();
    m.schedule.sigma_floor = s.at("sigma_floor").get<double>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.mode = mode_from_json(j.at("estimator"));
    m.h_cutoff = j.at("h_cutoff").get<double>();
    m.rbf_bandwidth = j.at("rbf_bandwidth").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed map file: ") + e.what());
  }
}

void save_map(const TrainedMap& map, const std::filesystem::path& path) {
  write_json(to_json(map), path);
}

TrainedMap load_map(const std::filesystem::path& path) {
  return trained_map_from_json(read_json(path));
}

json to_json(const TrainingRecord& record) {
  json steps = json::array();
  for (const TrainingStep& s : record.steps) {
    steps.push_back({{"sample", s.sample_index},
                     {"bmu", s.bmu},
                     {"alpha", s.alpha},
                     {"sigma", s.sigma},
                     {"quantization_error", s.quantization_error}});
  }
  return {{"format", "qsom-training-record"},
          {"version", 1},
          {"iterations", record.steps.size()},
          {"bmu_evaluations", record.bmu_evaluations},
          {"gradient_evaluations", record.gradient_evaluations},
          {"steps", std::move(steps)}};
}

void save_record(const TrainingRecord& record, const std::filesystem::path& path) {
  write_json(to_json(record), path);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

LabeledTable load_feature_csv(const std::filesystem::path& path, std::size_t n_features) {
  std::ifstream in = open_input(path);
  LabeledTable table;
  std::map<std::string, int> label_ids;
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> labeled;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);

    std::vector<double> row;
    bool numeric = cells.size() >= n_features;
    for (std::size_t c = 0; numeric && c < n_features; ++c) {
      const auto v = parse_double(cells[c]);
      if (v) row.push_back(*v); else numeric = false;
    }
    if (!numeric) {
      const bool all_numeric = std::all_of(cells.begin(), cells.end(),
                                           [](const std::string& c) { return parse_double(c).has_value(); });
      if (table.features.empty() && !labeled && !all_numeric) {
        labeled = cells.size() > n_features;  // header row
        continue;
      }
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected " + std::to_string(n_features) + " numeric columns");
    }
    if (cells.size() > n_features + 1) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": too many columns");
    }
    const bool has_label = cells.size() == n_features + 1;
    if (table.features.empty()) {
      labeled = has_label;
    } else if (has_label != labeled.value_or(has_label)) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": label column present on some rows only");
    }
    if (has_label) {
      const std::string& name = cells[n_features];
      if (name.empty()) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": empty label");
      }
      auto [it, inserted] = label_ids.try_emplace(name, static_cast<int>(label_ids.size()));
      if (inserted) table.label_names.push_back(name);
      table.labels.push_back(it->second);
    }
    table.features.push_back(std::move(row));
  }
  return table;
}

void scale_to_unit_interval(std::vector<std::vector<double>>& features) {
  if (features.empty()) return;
  const std::size_t dim = features.front().size();
  for (std::size_t c = 0; c < dim; ++c) {
    double lo = features.front()[c];
    double hi = lo;
    for (const auto& r : features) {
      lo = std::min(lo, r[c]);
      hi = std::max(hi, r[c]);
    }
    for (auto& r : features) {
      r[c] = hi > lo ? 2.0 * (r[c] - lo) / (hi - lo) - 1.0 : 0.0;
    }
  }
}

void write_assignments(const std::vector<AssignmentRow>& rows,
                       const std::filesystem::path& path) {
  std::ofstream out = open_output(path);
  out << "sample_id,bmu_row,bmu_col,label\n";
  for (const AssignmentRow& r : rows) {
    out << r.sample_id << ',' << r.row << ',' << r.col << ',';
    if (r.label) out << *r.label;
    out << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<AssignmentRow> read_assignments(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<AssignmentRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line_no == 1 && line.rfind("sample_id", 0) == 0) continue;
    const auto cells = split_csv(line);
    const auto bad = [&] {
      return IoError(path.string() + ":" + std::to_string(line_no) + ": malformed assignment row");
    };
    if (cells.size() < 3 || cells.size() > 4) throw bad();
    AssignmentRow r;
    const auto id = parse_index(cells[0]);
    const auto row = parse_index(cells[1]);
    const auto col = parse_index(cells[2]);
    if (!id || !row || !col) throw bad();
    r.sample_id = *id;
    r.row = *row;
    r.col = *col;
    if (cells.size() == 4 && !cells[3].empty()) {
      int label = 0;
      const auto [ptr, ec] = std::from_chars(cells[3].data(), cells[3].data() + cells[3].size(), label);
      if (ec != std::errc{} || ptr != cells[3].data() + cells[3].size()) throw bad();
      r.label = label;
    }
    rows.push_back(r);
  }
  return rows;
}

// ---- Schwinger dataset ------------------------------------------------------

void export_dataset(std::span<const LabeledQuantumState> states,
                    const std::filesystem::path& path) {
  if (states.empty()) throw ArgumentError("refusing to export an empty dataset");
  json records = json::array();
  for (const LabeledQuantumState& s : states) {
    json amps = json::array();
    for (const Complex& a : s.amplitudes) amps.push_back({a.real(), a.imag()});
    records.push_back({{"n_sites", s.n_sites},
                       {"m_over_g", s.m_over_g},
                       {"theta", s.theta},
                       {"level", s.level},
                       {"energy", s.energy},
                       {"avg_field", s.avg_field},
                       {"link_field", s.link_field},
                       {"label", s.label},
                       {"degenerate", s.degenerate},
                       {"residual", s.residual},
                       {"amplitudes", std::move(amps)}});
  }
  write_json({{"format", "qsom-schwinger-dataset"}, {"version", 1}, {"records", records}},
             path);
}

std::vector<LabeledQuantumState> load_dataset(const std::filesystem::path& path) {
  const json j = read_json(path);
  try {
    std::vector<LabeledQuantumState> out;
    for (const json& r : j.at("records")) {
      LabeledQuantumState s;
      s.n_sites = r.at("n_sites").get<std::size_t>();
      s.m_over_g = r.at("m_over_g").get<double>();
      s.theta = r.at("theta").get<double>();
      s.level = r.value("level", std::size_t{0});
      s.energy = r.at("energy").get<double>();
      s.avg_field = r.at("avg_field").get<double>();
      s.link_field = r.value("link_field", 0.0);
      s.label = r.at("label").get<int>();
      s.degenerate = r.value("degenerate", false);
      s.residual = r.value("residual", 0.0);
      for (const json& a : r.at("amplitudes")) {
        s.amplitudes.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
      }
      if (s.amplitudes.size() != (std::size_t{1} << s.n_sites)) {
        throw IoError(path.string() + ": record amplitude count does not match n_sites");
      }
      out.push_back(std::move(s));
    }
    return out;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": malformed dataset: " + e.what());
  }
}

}  // namespace qsom
