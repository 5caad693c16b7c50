#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

namespace driftbench {

enum class Provider { rapl, cpu_time_proxy };

inline std::string_view to_string(Provider p) { return p == Provider::rapl ? "rapl" : "cpu_time_proxy"; }

inline Provider parse_provider(std::string_view s) {
  if (s == "rapl") return Provider::rapl;
  if (s == "cpu_time_proxy" || s == "proxy") return Provider::cpu_time_proxy;
  throw std::invalid_argument("unknown energy provider: " + std::string(s));
}

struct EnergySample {
  double joules = 0.0;
  double duration_s = 0.0;
  Provider provider = Provider::cpu_time_proxy;
  unsigned counter_wraps = 0;
};

/// Monotonic energy counter. Readings are opaque integers in the source's
/// native unit; `joules_between` converts a pair into a non-negative delta.
class EnergySource {
 public:
  using Reading = std::vector<std::uint64_t>;

  virtual ~EnergySource() = default;
  virtual Provider provider() const = 0;
  virtual Reading read() = 0;
  virtual double joules_between(const Reading& before, const Reading& after, unsigned& wraps) const = 0;
};

/// Delta of a counter that wraps to zero after `max_range`.
inline std::uint64_t wrapped_delta(std::uint64_t before, std::uint64_t after, std::uint64_t max_range,
                                   unsigned& wraps) {
  if (after >= before) return after - before;
  ++wraps;
  return (max_range - before) + after;
}

// ---------------------------------------------------------------------------
// RAPL through the powercap sysfs tree

class RaplSource : public EnergySource {
 public:
  struct Domain {
    std::filesystem::path energy_file;
    std::uint64_t max_range_uj = 0;
    std::string name;
  };

  /// Package domains under `root` (the directories `intel-rapl:N` whose
  /// `name` starts with "package"). Throws with the reason when none is
  /// readable.
  explicit RaplSource(const std::filesystem::path& root = "/sys/class/powercap") {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw std::runtime_error(root.string() + " does not exist");
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root, ec)) {
      const auto leaf = entry.path().filename().string();
      // top-level zones only: exactly one ':' (subzones look like intel-rapl:0:1)
      if (leaf.rfind("intel-rapl:", 0) == 0 && leaf.find(':') == leaf.rfind(':')) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& dir : dirs) {
      Domain d;
      d.name = read_line(dir / "name").value_or("");
      if (d.name.rfind("package", 0) != 0) continue;
      d.energy_file = dir / "energy_uj";
      const auto max = read_line(dir / "max_energy_range_uj");
      if (!max) throw std::runtime_error("cannot read " + (dir / "max_energy_range_uj").string());
      d.max_range_uj = std::stoull(*max);
      if (!read_line(d.energy_file)) {
        throw std::runtime_error("cannot read " + d.energy_file.string() + " (permissions?)");
      }
      domains_.push_back(std::move(d));
    }
    if (domains_.empty()) throw std::runtime_error("no RAPL package domain under " + root.string());
  }

  Provider provider() const override { return Provider::rapl; }
  const std::vector<Domain>& domains() const { return domains_; }

  Reading read() override {
    Reading r;
    r.reserve(domains_.size());
    for (const auto& d : domains_) {
      const auto line = read_line(d.energy_file);
      if (!line) throw std::runtime_error("cannot read " + d.energy_file.string());
      r.push_back(std::stoull(*line));
    }
    return r;
  }

  double joules_between(const Reading& before, const Reading& after, unsigned& wraps) const override {
    std::uint64_t uj = 0;
    for (std::size_t i = 0; i < domains_.size(); ++i) {
      uj += wrapped_delta(before[i], after[i], domains_[i].max_range_uj, wraps);
    }
    return static_cast<double>(uj) * 1e-6;
  }

 private:
  static std::optional<std::string> read_line(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::string line;
    if (!in || !std::getline(in, line)) return std::nullopt;
    return line;
  }

  std::vector<Domain> domains_;
};

// ---------------------------------------------------------------------------
// CPU-time proxy

inline std::uint64_t process_cpu_ns() {
  timespec ts{};
  clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
  return static_cast<std::uint64_t>(ts.tv_sec) * 1'000'000'000ULL + static_cast<std::uint64_t>(ts.tv_nsec);
}

/// Joules = process CPU seconds x configured watts. Counts CPU time, not
/// wall time, so sleeping costs nothing.
class CpuTimeProxySource : public EnergySource {
 public:
  explicit CpuTimeProxySource(double watts = 15.0, std::function<std::uint64_t()> clock = process_cpu_ns)
      : watts_(watts), clock_(std::move(clock)) {
    if (!(watts_ > 0.0)) throw std::invalid_argument("proxy watts must be positive");
  }

  Provider provider() const override { return Provider::cpu_time_proxy; }
  double watts() const { return watts_; }

  Reading read() override { return {clock_()}; }

  double joules_between(const Reading& before, const Reading& after, unsigned&) const override {
    const std::uint64_t ns = after[0] >= before[0] ? after[0] - before[0] : 0;
    return static_cast<double>(ns) * 1e-9 * watts_;
  }

 private:
  double watts_;
  std::function<std::uint64_t()> clock_;
};

// ---------------------------------------------------------------------------
// Settings and provider selection

using Logger = std::function<void(const std::string&)>;

inline void log_to_stderr(const std::string& msg) { std::cerr << "driftbench: " << msg << '\n'; }

struct EnergySettings {
  std::string provider = "auto";  // auto | rapl | cpu_time_proxy
  double proxy_watts = 15.0;
  double warm_up_s = 10.0;
  double cooldown_s = 5.0;
  std::filesystem::path powercap_root = "/sys/class/powercap";

  /// Applies DRIFTBENCH_ENERGY_PROVIDER, DRIFTBENCH_PROXY_WATTS,
  /// DRIFTBENCH_WARMUP_S and DRIFTBENCH_COOLDOWN_S when set.
  EnergySettings with_env_overrides() const {
    EnergySettings s = *this;
    if (const char* v = std::getenv("DRIFTBENCH_ENERGY_PROVIDER")) s.provider = v;
    if (const char* v = std::getenv("DRIFTBENCH_PROXY_WATTS")) s.proxy_watts = std::stod(v);
    if (const char* v = std::getenv("DRIFTBENCH_WARMUP_S")) s.warm_up_s = std::stod(v);
    if (const char* v = std::getenv("DRIFTBENCH_COOLDOWN_S")) s.cooldown_s = std::stod(v);
    return s;
  }
};

/// "rapl" insists on RAPL and throws if unreadable; "auto" tries RAPL and
/// falls back to the proxy, logging why.
inline std::unique_ptr<EnergySource> make_energy_source(const EnergySettings& s, const Logger& log = log_to_stderr) {
  if (s.provider == "cpu_time_proxy" || s.provider == "proxy") {
    return std::make_unique<CpuTimeProxySource>(s.proxy_watts);
  }
  if (s.provider != "auto" && s.provider != "rapl") {
    throw std::invalid_argument("unknown energy provider: " + s.provider);
  }
  try {
    return std::make_unique<RaplSource>(s.powercap_root);
  } catch (const std::exception& e) {
    if (s.provider == "rapl") throw std::runtime_error(std::string("RAPL unavailable: ") + e.what());
    if (log) {
      log(std::string("warning: RAPL unavailable (") + e.what() + "); falling back to cpu_time_proxy at " +
          std::to_string(s.proxy_watts) + " W");
    }
    return std::make_unique<CpuTimeProxySource>(s.proxy_watts);
  }
}

// ---------------------------------------------------------------------------
// Measured regions

class MeterBusyError : public std::logic_error {
 public:
  MeterBusyError() : std::logic_error("energy meter: measured regions must not nest or overlap") {}
};

/// Measures one region at a time; a second concurrent or nested region throws.
class Meter {
 public:
  explicit Meter(std::unique_ptr<EnergySource> source) : source_(std::move(source)) {
    if (!source_) throw std::invalid_argument("Meter needs an energy source");
  }

  Provider provider() const { return source_->provider(); }
  EnergySource& source() { return *source_; }
  bool busy() const { return busy_.load(); }

  /// Runs `region` and returns its result (if any) with the energy sample.
  template <class F>
  auto measure(F&& region) {
    Guard guard(busy_);
    const auto t0 = std::chrono::steady_clock::now();
    const auto before = source_->read();
    if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
      std::forward<F>(region)();
      return finish(before, t0);
    } else {
      auto result = std::forward<F>(region)();
      return std::pair{std::move(result), finish(before, t0)};
    }
  }

 private:
  struct Guard {
    explicit Guard(std::atomic<bool>& flag) : flag_(flag) {
      if (flag_.exchange(true)) throw MeterBusyError();
    }
    ~Guard() { flag_.store(false); }
    std::atomic<bool>& flag_;
  };

  EnergySample finish(const EnergySource::Reading& before, std::chrono::steady_clock::time_point t0) {
    const auto after = source_->read();
    const auto t1 = std::chrono::steady_clock::now();
    EnergySample s;
    s.provider = source_->provider();
    s.joules = source_->joules_between(before, after, s.counter_wraps);
    s.duration_s = std::max(std::chrono::duration<double>(t1 - t0).count(), 1e-9);
    return s;
  }

  std::unique_ptr<EnergySource> source_;
  std::atomic<bool> busy_{false};
};

// ---------------------------------------------------------------------------
// Warm-up and cool-down

/// A CPU-bound loop the optimizer cannot remove.
inline std::uint64_t busy_work(std::uint64_t iterations) {
  std::uint64_t x = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t i = 0; i < iterations; ++i) {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    asm volatile("" : "+r"(x));
  }
  return x;
}

/// Spins for at least `seconds` of wall time; `on_start` fires once.
inline double warm_up(double seconds = 10.0, const std::function<void()>& on_start = {}) {
  if (on_start) on_start();
  const auto t0 = std::chrono::steady_clock::now();
  double elapsed = 0.0;
  do {
    busy_work(1'000'000);
    elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } while (elapsed < seconds);
  return elapsed;
}

/// Blocks for at least `seconds` (monotonic clock).
inline void cooldown_sleep(double seconds = 5.0) {
  if (seconds <= 0.0) return;
  const auto until = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
  while (std::chrono::steady_clock::now() < until) std::this_thread::sleep_until(until);
}

}  // namespace driftbench
