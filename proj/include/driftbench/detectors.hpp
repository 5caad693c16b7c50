#pragma once

#include <cstdint>
#include <memory>

#include "driftbench/detectors/adwin.hpp"
#include "driftbench/detectors/ddm.hpp"
#include "driftbench/detectors/detector.hpp"
#include "driftbench/detectors/eddm.hpp"
#include "driftbench/detectors/hddm_a.hpp"
#include "driftbench/detectors/hddm_w.hpp"
#include "driftbench/detectors/kswin.hpp"
#include "driftbench/detectors/page_hinkley.hpp"

namespace driftbench {

/// Detector with default parameters. `seed` only affects KSWIN's sampling.
inline std::unique_ptr<DriftDetector> make_detector(DetectorKind kind, std::uint32_t seed = 0) {
  switch (kind) {
    case DetectorKind::adwin: return std::make_unique<Adwin>();
    case DetectorKind::ddm: return std::make_unique<Ddm>();
    case DetectorKind::eddm: return std::make_unique<Eddm>();
    case DetectorKind::hddm_a: return std::make_unique<HddmA>();
    case DetectorKind::hddm_w: return std::make_unique<HddmW>();
    case DetectorKind::kswin: {
      KswinParams params;
      params.seed = seed;
      return std::make_unique<Kswin>(params);
    }
    case DetectorKind::page_hinkley: return std::make_unique<PageHinkley>();
  }
  throw std::invalid_argument("make_detector: unknown kind");
}

/// Indices (0-based) of every update that reported drift.
template <typename Range>
std::vector<std::size_t> alarm_trace(DriftDetector& detector, const Range& values) {
  std::vector<std::size_t> alarms;
  std::size_t i = 0;
  for (const auto& v : values) {
    if (detector.update(static_cast<double>(v)) == DriftStatus::drift) alarms.push_back(i);
    ++i;
  }
  return alarms;
}

}  // namespace driftbench
