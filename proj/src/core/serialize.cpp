#include "core/serialize.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace groomsim {

std::string_view to_string(KernelScope scope) {
  return scope == KernelScope::AllGroomees ? "all_groomees" : "existing_partners";
}

KernelScope kernel_scope_from_string(std::string_view name) {
  if (name == "all_groomees") return KernelScope::AllGroomees;
  if (name == "existing_partners") return KernelScope::ExistingPartners;
  throw std::invalid_argument("unknown kernel scope '" + std::string(name) +
                              "' (expected all_groomees or existing_partners)");
}

Json to_json(const Environment& env) {
  return Json{{"n_groomers", env.n_groomers},       {"n_groomees", env.n_groomees},
              {"r_c", env.r_c},                     {"r_g", env.r_g},
              {"t_generations", env.t_generations}, {"kernel_scope", to_string(env.kernel_scope)}};
}

Environment environment_from_json(const Json& j) {
  Environment env;
  env.n_groomers = j.at("n_groomers").get<std::uint32_t>();
  env.n_groomees = j.at("n_groomees").get<std::uint32_t>();
  env.r_c = j.at("r_c").get<std::uint32_t>();
  env.r_g = j.at("r_g").get<std::uint32_t>();
  env.t_generations = j.at("t_generations").get<std::uint32_t>();
  if (j.contains("kernel_scope")) {
    env.kernel_scope = kernel_scope_from_string(j.at("kernel_scope").get<std::string>());
  }
  return env;
}

Json to_json(const GenerationRecord& r) {
  return Json{{"generation", r.generation}, {"mean_s", r.mean_s},
              {"median_s", r.median_s},     {"var_s", r.var_s},
              {"mean_q", r.mean_q},         {"median_q", r.median_q},
              {"var_q", r.var_q},           {"total_fitness", r.total_fitness},
              {"max_fitness", r.max_fitness}};
}

GenerationRecord generation_record_from_json(const Json& j) {
  GenerationRecord r;
  r.generation = j.at("generation").get<std::uint32_t>();
  r.mean_s = j.at("mean_s").get<double>();
  r.median_s = j.at("median_s").get<double>();
  r.var_s = j.at("var_s").get<double>();
  r.mean_q = j.at("mean_q").get<double>();
  r.median_q = j.at("median_q").get<double>();
  r.var_q = j.at("var_q").get<double>();
  r.total_fitness = j.at("total_fitness").get<std::uint64_t>();
  r.max_fitness = j.at("max_fitness").get<std::uint32_t>();
  return r;
}

Json to_json(const SimulationResult& result, const Json& metadata) {
  Json j;
  j[std::string(kMetaKey)] = metadata;
  j["env"] = to_json(result.env);
  j["seed"] = result.seed;

  Json records = Json::array();
  for (const auto& r : result.records) records.push_back(to_json(r));
  j["records"] = std::move(records);

  Json pop = Json::array();
  for (const auto& m : result.final_population) pop.push_back(Json{{"s", m.s}, {"q", m.q}});
  j["final_population"] = std::move(pop);

  Json w = Json::array();
  for (std::size_t i = 0; i < result.final_w.rows(); ++i) {
    const auto row = result.final_w.row(i);
    w.push_back(Json(std::vector<std::uint32_t>(row.begin(), row.end())));
  }
  j["final_w"] = std::move(w);

  if (result.grooming_event_log) {
    Json log = Json::array();
    for (const auto& e : *result.grooming_event_log) {
      log.push_back(Json{{"groomer", e.groomer},
                         {"w", e.w},
                         {"exposures", e.exposures},
                         {"chosen", e.chosen}});
    }
    j["grooming_event_log"] = std::move(log);
  } else {
    j["grooming_event_log"] = nullptr;
  }
  return j;
}

SimulationResult simulation_result_from_json(const Json& j) {
  SimulationResult result;
  result.env = environment_from_json(j.at("env"));
  result.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& r : j.at("records")) result.records.push_back(generation_record_from_json(r));
  for (const auto& m : j.at("final_population")) {
    result.final_population.push_back({m.at("s").get<double>(), m.at("q").get<double>()});
  }
  const auto& w = j.at("final_w");
  const std::size_t rows = w.size();
  const std::size_t cols = rows == 0 ? 0 : w.at(0).size();
  result.final_w = RelationshipMatrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (w.at(i).size() != cols) throw std::invalid_argument("final_w rows differ in length");
    for (std::size_t k = 0; k < cols; ++k) result.final_w(i, k) = w.at(i).at(k).get<std::uint32_t>();
  }
  const auto& log = j.at("grooming_event_log");
  if (!log.is_null()) {
    std::vector<ExposureRecord> entries;
    for (const auto& e : log) {
      entries.push_back({e.at("groomer").get<std::uint32_t>(), e.at("w").get<std::uint32_t>(),
                         e.at("exposures").get<std::uint64_t>(), e.at("chosen").get<std::uint64_t>()});
    }
    result.grooming_event_log = std::move(entries);
  }
  return result;
}

std::string records_jsonl(const std::vector<GenerationRecord>& records, const Json& metadata) {
  std::string out = Json{{std::string(kMetaKey), metadata}}.dump();
  out += '\n';
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string csv_metadata_line(const Json& metadata) { return "# " + metadata.dump() + "\n"; }

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace groomsim
