#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "driftbench/streamgen.hpp"

namespace driftbench {

enum class AlarmKind { true_alarm, false_alarm, missed };

inline std::string_view to_string(AlarmKind k) {
  switch (k) {
    case AlarmKind::true_alarm: return "true";
    case AlarmKind::false_alarm: return "false";
    case AlarmKind::missed: return "missed";
  }
  return "?";
}

inline AlarmKind parse_alarm_kind(std::string_view s) {
  if (s == "true") return AlarmKind::true_alarm;
  if (s == "false") return AlarmKind::false_alarm;
  if (s == "missed") return AlarmKind::missed;
  throw std::invalid_argument("unknown alarm kind: " + std::string(s));
}

struct AlarmOutcome {
  AlarmKind kind = AlarmKind::missed;
  std::optional<std::size_t> detected_index;
  std::size_t drift_index = 0;  // the schedule position evaluated
  std::optional<double> closeness;

  bool operator==(const AlarmOutcome&) const = default;
};

/// 1 for a detection at the drift start, falling linearly to
/// 1 / (concept_end - drift_start) at the last index of the concept.
inline double closeness(std::size_t detected_index, std::size_t drift_start, std::size_t concept_end) {
  if (!(drift_start <= detected_index && detected_index < concept_end)) {
    throw std::invalid_argument("closeness: detection " + std::to_string(detected_index) + " outside [" +
                                std::to_string(drift_start) + ", " + std::to_string(concept_end) + ")");
  }
  // same as 1 - (d - start) / (end - start), without the cancellation
  return static_cast<double>(concept_end - detected_index) / static_cast<double>(concept_end - drift_start);
}

/// Scores a detection against the concept that starts at positions[k].
inline AlarmOutcome classify_alarm(std::optional<std::size_t> detected_index, const DriftSchedule& schedule,
                                   std::size_t k) {
  if (k >= schedule.positions.size()) throw std::out_of_range("classify_alarm: no drift " + std::to_string(k));
  if (detected_index && *detected_index >= schedule.total_length) {
    throw std::out_of_range("classify_alarm: detection beyond the stream");
  }
  AlarmOutcome out;
  out.drift_index = schedule.positions[k];
  out.detected_index = detected_index;
  if (!detected_index) return out;
  const std::size_t end = schedule.concept_end(k);
  if (out.drift_index <= *detected_index && *detected_index < end) {
    out.kind = AlarmKind::true_alarm;
    out.closeness = closeness(*detected_index, out.drift_index, end);
  } else {
    out.kind = AlarmKind::false_alarm;
  }
  return out;
}

struct AlarmAggregate {
  std::size_t true_count = 0;
  std::size_t false_count = 0;
  std::size_t missed_count = 0;
  double true_alarm_pct = 0.0;
  std::optional<double> mean_closeness;  // absent without true alarms

  std::size_t total() const { return true_count + false_count + missed_count; }
};

inline AlarmAggregate aggregate_counts(std::size_t true_count, std::size_t false_count, std::size_t missed_count,
                                       std::optional<double> mean_closeness = std::nullopt) {
  AlarmAggregate a{true_count, false_count, missed_count, 0.0, mean_closeness};
  if (a.total() == 0) throw std::invalid_argument("aggregate_alarms: no outcomes");
  a.true_alarm_pct = 100.0 * static_cast<double>(true_count) / static_cast<double>(a.total());
  return a;
}

inline AlarmAggregate aggregate_alarms(std::span<const AlarmOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("aggregate_alarms: no outcomes");
  std::size_t counts[3] = {0, 0, 0};
  double closeness_sum = 0.0;
  for (const auto& o : outcomes) {
    ++counts[static_cast<int>(o.kind)];
    if (o.kind == AlarmKind::true_alarm) closeness_sum += o.closeness.value();
  }
  std::optional<double> mean;
  if (counts[0] > 0) mean = closeness_sum / static_cast<double>(counts[0]);
  return aggregate_counts(counts[0], counts[1], counts[2], mean);
}

}  // namespace driftbench
