#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "driftbench/csv.hpp"
#include "driftbench/streamgen.hpp"

namespace driftbench {

/// Path of the metadata sidecar written next to a stream CSV.
inline std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p += ".meta.json";
  return p;
}

inline nlohmann::json spec_to_json(const StreamSpec& spec) {
  return {{"generator", std::string(to_string(spec.generator))},
          {"drift_type", std::string(to_string(spec.drift_type))},
          {"seed", spec.seed},
          {"positions", spec.schedule.positions},
          {"width", spec.schedule.width},
          {"total_length", spec.schedule.total_length}};
}

inline StreamSpec spec_from_json(const nlohmann::json& j) {
  StreamSpec spec;
  spec.generator = parse_generator(j.at("generator").get<std::string>());
  spec.drift_type = parse_drift_type(j.at("drift_type").get<std::string>());
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.schedule.positions = j.at("positions").get<std::vector<std::size_t>>();
  spec.schedule.width = j.at("width").get<std::size_t>();
  spec.schedule.total_length = j.at("total_length").get<std::size_t>();
  spec.schedule.validate();
  return spec;
}

/// Writes `f0,...,fk,label` rows plus a JSON sidecar holding the StreamSpec.
/// Numbers use the shortest round-trip form, categories their level names,
/// booleans 0/1.
inline void write_stream_csv(const LabeledStream& stream, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  for (std::size_t i = 0; i < stream.schema.size(); ++i) out << 'f' << i << ',';
  out << "label\n";
  for (const auto& inst : stream.instances) {
    for (std::size_t i = 0; i < inst.features.size(); ++i) {
      const auto& v = inst.features[i];
      if (const double* d = std::get_if<double>(&v)) {
        out << csv::format_double(*d);
      } else if (const bool* b = std::get_if<bool>(&v)) {
        out << (*b ? '1' : '0');
      } else {
        out << stream.schema[i].levels.at(std::get<Category>(v).level);
      }
      out << ',';
    }
    out << int{inst.label} << '\n';
  }
  out.flush();
  if (!out) throw IoError(path, "write failed");

  const auto meta_path = sidecar_path(path);
  auto meta = open_for_write(meta_path);
  meta << spec_to_json(stream.spec).dump(2) << '\n';
  if (!meta) throw IoError(meta_path, "write failed");
}

inline LabeledStream read_stream_csv(const std::filesystem::path& path) {
  const auto meta_path = sidecar_path(path);
  nlohmann::json meta;
  {
    auto in = open_for_read(meta_path);
    try {
      meta = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
      throw IoError(meta_path, e.what());
    }
  }
  LabeledStream stream;
  stream.spec = spec_from_json(meta);
  stream.schema = schema_for(stream.spec.generator);

  auto in = open_for_read(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path, "missing header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != stream.schema.size() + 1) {
      throw IoError(path, "line " + std::to_string(line_no) + ": wrong field count");
    }
    Instance inst;
    try {
      for (std::size_t i = 0; i < stream.schema.size(); ++i) {
        const auto& spec = stream.schema[i];
        switch (spec.kind) {
          case FeatureKind::numeric: inst.features.emplace_back(csv::parse_double(fields[i])); break;
          case FeatureKind::boolean: inst.features.emplace_back(fields[i] == "1"); break;
          case FeatureKind::categorical: {
            std::size_t level = 0;
            while (level < spec.levels.size() && spec.levels[level] != fields[i]) ++level;
            if (level == spec.levels.size()) throw std::invalid_argument("unknown level " + fields[i]);
            inst.features.emplace_back(Category{static_cast<std::uint8_t>(level)});
            break;
          }
        }
      }
      inst.label = static_cast<Label>(csv::parse_int(fields.back()));
      check_schema(stream.schema, inst);
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      throw IoError(path, "line " + std::to_string(line_no) + ": " + e.what());
    }
    stream.instances.push_back(std::move(inst));
  }
  return stream;
}

}  // namespace driftbench
