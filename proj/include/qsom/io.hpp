#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsom/kernel.hpp"
#include "qsom/som.hpp"

namespace qsom {

enum class TrainerKind { kClassical, kKernelized, kQuantum };

const char* to_string(TrainerKind kind);
TrainerKind parse_trainer(const std::string& name);

/// Everything needed to reproduce inference from a trained map.
struct TrainedMap {
  SomGrid grid;
  TrainerKind trainer = TrainerKind::kQuantum;
  FeatureMapConfig feature_map;
  Schedule schedule;
  std::uint64_t seed = 0;
  EstimatorMode mode = ExactMode{};
  double h_cutoff = kDefaultHCutoff;
  double rbf_bandwidth = 1.0;
  std::string dataset_kind = "iris";

  friend bool operator==(const TrainedMap&, const TrainedMap&);
};

nlohmann::json to_json(const TrainedMap& map);
TrainedMap trained_map_from_json(const nlohmann::json& j);

void save_map(const TrainedMap& map, const std::filesystem::path& path);
TrainedMap load_map(const std::filesystem::path& path);

nlohmann::json to_json(const TrainingRecord& record);
void save_record(const TrainingRecord& record, const std::filesystem::path& path);

/// Tabular classical data with optional class labels.
struct LabeledTable {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;  // empty when the file had no label column
  std::vector<std::string> label_names;
};

/// CSV with a fixed number of numeric columns and an optional trailing string
/// label. A first row that does not parse as numbers is taken as a header.
LabeledTable load_feature_csv(const std::filesystem::path& path,
                              std::size_t n_features = 4);

/// Per-column min-max scaling onto [-1, 1]; constant columns map to 0.
void scale_to_unit_interval(std::vector<std::vector<double>>& features);

struct AssignmentRow {
  std::size_t sample_id = 0;
  std::size_t row = 0;
  std::size_t col = 0;
  std::optional<int> label;
};

void write_assignments(const std::vector<AssignmentRow>& rows,
                       const std::filesystem::path& path);
std::vector<AssignmentRow> read_assignments(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace qsom
