#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "driftbench/classifiers/model.hpp"
#include "driftbench/csv.hpp"
#include "driftbench/detectors/detector.hpp"
#include "driftbench/energy.hpp"
#include "driftbench/metrics.hpp"
#include "driftbench/streamgen.hpp"

namespace driftbench {

struct Combo {
  DetectorKind detector = DetectorKind::adwin;
  Generator generator = Generator::sine;
  DriftType drift_type = DriftType::abrupt;
  Algorithm classifier = Algorithm::naive_bayes;

  bool operator==(const Combo&) const = default;
};

struct IterationResult {
  Combo combo;
  unsigned repetition = 0;
  std::size_t drift_k = 0;  // schedule position the alarm is scored against
  EnergySample train_energy;
  double train_accuracy = 0.0;
  EnergySample detection_energy;
  AlarmOutcome alarm;
  std::optional<double> pre_retrain_accuracy;
  std::optional<EnergySample> retrain_energy;  // present iff an alarm fired
  std::optional<double> retrain_accuracy;
};

/// Bump when the column set or meaning changes.
inline constexpr int kResultsSchemaVersion = 1;

inline const std::vector<std::string>& results_header() {
  static const std::vector<std::string> h = {
      "detector",       "generator",    "drift_type",      "classifier",       "repetition",     "train_energy_j",
      "train_acc",      "detect_energy_j", "alarm_kind",   "detected_index",   "closeness",      "pre_retrain_acc",
      "retrain_energy_j", "retrain_acc", "provider",       "drift_k"};
  return h;
}

/// Flat row as stored in the results file; absent values are empty cells.
struct ResultRow {
  DetectorKind detector = DetectorKind::adwin;
  Generator generator = Generator::sine;
  DriftType drift_type = DriftType::abrupt;
  Algorithm classifier = Algorithm::naive_bayes;
  unsigned repetition = 0;
  double train_energy_j = 0.0;
  double train_acc = 0.0;
  double detect_energy_j = 0.0;
  AlarmKind alarm_kind = AlarmKind::missed;
  std::optional<std::size_t> detected_index;
  std::optional<double> closeness;
  std::optional<double> pre_retrain_acc;
  std::optional<double> retrain_energy_j;
  std::optional<double> retrain_acc;
  Provider provider = Provider::cpu_time_proxy;
  std::size_t drift_k = 0;

  bool operator==(const ResultRow&) const = default;

  static ResultRow from(const IterationResult& r) {
    ResultRow row;
    row.detector = r.combo.detector;
    row.generator = r.combo.generator;
    row.drift_type = r.combo.drift_type;
    row.classifier = r.combo.classifier;
    row.repetition = r.repetition;
    row.train_energy_j = r.train_energy.joules;
    row.train_acc = r.train_accuracy;
    row.detect_energy_j = r.detection_energy.joules;
    row.alarm_kind = r.alarm.kind;
    row.detected_index = r.alarm.detected_index;
    row.closeness = r.alarm.closeness;
    row.pre_retrain_acc = r.pre_retrain_accuracy;
    if (r.retrain_energy) row.retrain_energy_j = r.retrain_energy->joules;
    row.retrain_acc = r.retrain_accuracy;
    row.provider = r.detection_energy.provider;
    row.drift_k = r.drift_k;
    return row;
  }

  /// Detection energy plus retraining energy (zero when nothing was retrained).
  double combined_energy_j() const { return detect_energy_j + retrain_energy_j.value_or(0.0); }
};

namespace detail {

inline std::string opt_cell(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

inline std::optional<double> opt_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return csv::parse_double(s);
}

}  // namespace detail

inline std::vector<std::string> to_cells(const ResultRow& r) {
  return {std::string(to_string(r.detector)),
          std::string(to_string(r.generator)),
          std::string(to_string(r.drift_type)),
          std::string(to_string(r.classifier)),
          std::to_string(r.repetition),
          csv::format_double(r.train_energy_j),
          csv::format_double(r.train_acc),
          csv::format_double(r.detect_energy_j),
          std::string(to_string(r.alarm_kind)),
          r.detected_index ? std::to_string(*r.detected_index) : std::string(),
          detail::opt_cell(r.closeness),
          detail::opt_cell(r.pre_retrain_acc),
          detail::opt_cell(r.retrain_energy_j),
          detail::opt_cell(r.retrain_acc),
          std::string(to_string(r.provider)),
          std::to_string(r.drift_k)};
}

/// Parses one data row laid out as in `header` (columns may appear in any order).
inline ResultRow parse_result_row(const std::vector<std::string>& header, const std::vector<std::string>& cells) {
  auto col = [&](const char* name) -> const std::string& {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return cells.at(i);
    }
    throw std::invalid_argument(std::string("results: missing column ") + name);
  };
  auto has = [&](const char* name) {
    for (const auto& h : header) {
      if (h == name) return true;
    }
    return false;
  };
  ResultRow r;
  r.detector = parse_detector(col("detector"));
  r.generator = parse_generator(col("generator"));
  r.drift_type = parse_drift_type(col("drift_type"));
  r.classifier = parse_algorithm(col("classifier"));
  r.repetition = static_cast<unsigned>(csv::parse_int(col("repetition")));
  r.train_energy_j = csv::parse_double(col("train_energy_j"));
  r.train_acc = csv::parse_double(col("train_acc"));
  r.detect_energy_j = csv::parse_double(col("detect_energy_j"));
  r.alarm_kind = parse_alarm_kind(col("alarm_kind"));
  if (!col("detected_index").empty()) r.detected_index = static_cast<std::size_t>(csv::parse_int(col("detected_index")));
  r.closeness = detail::opt_double(col("closeness"));
  r.pre_retrain_acc = detail::opt_double(col("pre_retrain_acc"));
  r.retrain_energy_j = detail::opt_double(col("retrain_energy_j"));
  r.retrain_acc = detail::opt_double(col("retrain_acc"));
  r.provider = parse_provider(col("provider"));
  if (has("drift_k")) r.drift_k = static_cast<std::size_t>(csv::parse_int(col("drift_k")));
  if ((r.alarm_kind == AlarmKind::true_alarm) != r.closeness.has_value()) {
    throw std::invalid_argument("results: closeness must be present exactly for true alarms");
  }
  if ((r.alarm_kind == AlarmKind::missed) == r.detected_index.has_value()) {
    throw std::invalid_argument("results: detected_index must be present exactly for alarms");
  }
  return r;
}

inline std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  const auto table = csv::read_table(path);
  std::vector<ResultRow> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    try {
      rows.push_back(parse_result_row(table.header, table.rows[i]));
    } catch (const std::exception& e) {
      throw IoError(path, "row " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return rows;
}

inline std::string results_preamble(const std::string& design_json) {
  return "# driftbench results v" + std::to_string(kResultsSchemaVersion) + "\n# design " + design_json + "\n" +
         csv::join(results_header()) + "\n";
}

/// Writes a complete results file (preamble, header, rows).
inline void write_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows,
                          const std::string& design_json = "{}") {
  auto out = open_for_write(path);
  out << results_preamble(design_json);
  for (const auto& r : rows) out << csv::join(to_cells(r)) << '\n';
  if (!out) throw IoError(path, "write failed");
}

}  // namespace driftbench
