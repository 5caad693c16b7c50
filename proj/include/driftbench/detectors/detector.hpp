#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace driftbench {

enum class DriftStatus { stable, warning, drift };

enum class DetectorKind { adwin, ddm, eddm, hddm_a, hddm_w, kswin, page_hinkley };

inline constexpr DetectorKind kAllDetectors[] = {
    DetectorKind::adwin,  DetectorKind::ddm,   DetectorKind::eddm,        DetectorKind::hddm_a,
    DetectorKind::hddm_w, DetectorKind::kswin, DetectorKind::page_hinkley};

inline std::string_view to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::adwin: return "adwin";
    case DetectorKind::ddm: return "ddm";
    case DetectorKind::eddm: return "eddm";
    case DetectorKind::hddm_a: return "hddm_a";
    case DetectorKind::hddm_w: return "hddm_w";
    case DetectorKind::kswin: return "kswin";
    case DetectorKind::page_hinkley: return "page_hinkley";
  }
  return "?";
}

/// Display name used in report tables.
inline std::string_view display_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::adwin: return "ADWIN";
    case DetectorKind::ddm: return "DDM";
    case DetectorKind::eddm: return "EDDM";
    case DetectorKind::hddm_a: return "HDDM_A";
    case DetectorKind::hddm_w: return "HDDM_W";
    case DetectorKind::kswin: return "KSWIN";
    case DetectorKind::page_hinkley: return "PageHinkley";
  }
  return "?";
}

inline DetectorKind parse_detector(std::string_view name) {
  for (auto kind : kAllDetectors) {
    if (name == to_string(kind) || name == display_name(kind)) return kind;
  }
  throw std::invalid_argument("unknown detector: " + std::string(name));
}

inline std::string_view to_string(DriftStatus status) {
  switch (status) {
    case DriftStatus::stable: return "stable";
    case DriftStatus::warning: return "warning";
    case DriftStatus::drift: return "drift";
  }
  return "?";
}

/// Incremental drift detector over a monitored signal (the harness feeds the
/// binary error indicator, 1 = misprediction).
///
/// update() returns the status after consuming the value. Detectors that
/// signal drift keep the reference behaviour of restarting their own
/// statistics on the following update where the algorithm does so, so the
/// caller may keep feeding values after an alarm. reset() restores the state
/// of a freshly constructed detector with the same parameters, including
/// updates_seen() and work_units().
///
/// work_units() is a coarse operation counter used to check per-update cost.
class DriftDetector {
 public:
  virtual ~DriftDetector() = default;

  DriftStatus update(double value) {
    ++updates_seen_;
    return do_update(value);
  }

  void reset() {
    updates_seen_ = 0;
    work_units_ = 0;
    do_reset();
  }

  std::uint64_t updates_seen() const { return updates_seen_; }
  std::uint64_t work_units() const { return work_units_; }

  virtual DetectorKind kind() const = 0;
  virtual std::unique_ptr<DriftDetector> clone() const = 0;

 protected:
  virtual DriftStatus do_update(double value) = 0;
  virtual void do_reset() = 0;

  void add_work(std::uint64_t units) { work_units_ += units; }

 private:
  std::uint64_t updates_seen_ = 0;
  std::uint64_t work_units_ = 0;
};

template <typename Derived>
class DetectorBase : public DriftDetector {
 public:
  std::unique_ptr<DriftDetector> clone() const override {
    return std::make_unique<Derived>(static_cast<const Derived&>(*this));
  }
};

}  // namespace driftbench
