#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "core/evolution.hpp"
#include "core/types.hpp"

namespace groomsim {

inline constexpr std::string_view kVersion = "0.1.0";

// Insertion-ordered JSON so emitted documents keep a stable field order.
using Json = nlohmann::ordered_json;

// Key of the metadata object that heads every JSON document and JSON Lines
// file written by the tool.
inline constexpr std::string_view kMetaKey = "_meta";

std::string_view to_string(KernelScope scope);
KernelScope kernel_scope_from_string(std::string_view name);

Json to_json(const Environment& env);
Environment environment_from_json(const Json& j);

Json to_json(const GenerationRecord& r);
GenerationRecord generation_record_from_json(const Json& j);

Json to_json(const SimulationResult& result, const Json& metadata);
SimulationResult simulation_result_from_json(const Json& j);

// One record per line, preceded by a {"_meta": ...} line.
std::string records_jsonl(const std::vector<GenerationRecord>& records, const Json& metadata);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// "# <metadata as compact JSON>" followed by a newline.
std::string csv_metadata_line(const Json& metadata);

// Writes through a temporary sibling and renames it into place.
// Throws IoError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);

}  // namespace groomsim
