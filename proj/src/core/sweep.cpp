#include "core/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "core/evolution.hpp"
#include "core/rng.hpp"

namespace groomsim {

namespace {

constexpr const char* kManifest = "manifest.jsonl";
constexpr const char* kResultsCsv = "results.csv";

std::vector<std::uint32_t> stepped(std::uint32_t first, std::uint32_t last, std::uint32_t step) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = first; v <= last; v += step) out.push_back(v);
  return out;
}

void require_increasing(const std::vector<std::uint32_t>& values, const char* name) {
  if (values.empty()) throw std::invalid_argument(std::string(name) + " must not be empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0) throw std::invalid_argument(std::string(name) + " entries must be >= 1");
    if (i > 0 && values[i] <= values[i - 1]) {
      throw std::invalid_argument(std::string(name) + " must be strictly increasing");
    }
  }
}

Environment job_environment(const SweepSpec& spec, const SweepJob& job) {
  Environment env;
  env.n_groomers = spec.n_groomers;
  env.n_groomees = job.m;
  env.r_c = job.r_c;
  env.r_g = job.r_g;
  env.t_generations = spec.t_generations;
  env.kernel_scope = spec.kernel_scope;
  return env;
}

std::filesystem::path records_path(const std::filesystem::path& out_dir, const SweepJob& job) {
  return out_dir / "sweep" / std::to_string(job.r_g) /
         (std::to_string(job.r_c) + "_" + std::to_string(job.m)) /
         ("rep" + std::to_string(job.replicate) + ".jsonl");
}

template <class T>
T parse_number(std::string_view field) {
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed number '" + std::string(field) + "' in sweep CSV");
  }
  return value;
}

// Reads finished results from an existing manifest. A truncated last line
// (from an interrupted append) is ignored and its job rerun.
std::map<SweepJob, SweepCellResult> load_manifest(const std::filesystem::path& path,
                                                  const Json& spec_json) {
  std::map<SweepJob, SweepCellResult> done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error&) {
      continue;
    }
    if (j.contains(std::string(kMetaKey))) {
      if (j.contains("spec") && j.at("spec") != spec_json) {
        throw std::invalid_argument("output directory " + path.parent_path().string() +
                                    " holds a sweep with a different spec");
      }
      header_seen = true;
      continue;
    }
    if (!header_seen) continue;
    const SweepCellResult r = sweep_cell_result_from_json(j);
    done[r.job()] = r;
  }
  return done;
}

}  // namespace

SweepSpec SweepSpec::reference_grid() {
  SweepSpec spec;
  spec.r_c_values = stepped(5, 50, 5);
  spec.m_values = stepped(5, 200, 5);
  spec.r_g_values = {100, 300};
  spec.replicates = 30;
  return spec;
}

void SweepSpec::validate() const {
  require_increasing(r_c_values, "r_c_values");
  require_increasing(m_values, "m_values");
  require_increasing(r_g_values, "r_g_values");
  if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (n_groomers < 1) throw std::invalid_argument("n_groomers must be >= 1");
  if (t_generations < 1) throw std::invalid_argument("t_generations must be >= 1");
}

Json to_json(const SweepSpec& spec) {
  return Json{{"r_c_values", spec.r_c_values},
              {"m_values", spec.m_values},
              {"r_g_values", spec.r_g_values},
              {"replicates", spec.replicates},
              {"base_seed", spec.base_seed},
              {"fixed",
               Json{{"n_groomers", spec.n_groomers}, {"t_generations", spec.t_generations}}},
              {"kernel_scope", to_string(spec.kernel_scope)}};
}

SweepSpec sweep_spec_from_json(const Json& j) {
  SweepSpec spec;
  try {
    spec.r_c_values = j.at("r_c_values").get<std::vector<std::uint32_t>>();
    spec.m_values = j.at("m_values").get<std::vector<std::uint32_t>>();
    spec.r_g_values = j.at("r_g_values").get<std::vector<std::uint32_t>>();
    spec.replicates = j.at("replicates").get<std::uint32_t>();
    spec.base_seed = j.value("base_seed", std::uint64_t{0});
    if (j.contains("fixed")) {
      const auto& fixed = j.at("fixed");
      spec.n_groomers = fixed.value("n_groomers", fixed.value("N", spec.n_groomers));
      spec.t_generations = fixed.value("t_generations", fixed.value("T", spec.t_generations));
    }
    if (j.contains("kernel_scope")) {
      spec.kernel_scope = kernel_scope_from_string(j.at("kernel_scope").get<std::string>());
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("invalid sweep spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint32_t r_c, std::uint32_t m,
                          std::uint32_t r_g, std::uint32_t replicate) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ r_g);
  h = splitmix64(h ^ r_c);
  h = splitmix64(h ^ m);
  return splitmix64(h ^ replicate);
}

std::vector<SweepJob> sweep_jobs(const SweepSpec& spec) {
  std::vector<SweepJob> jobs;
  jobs.reserve(spec.run_count());
  for (const auto r_g : spec.r_g_values) {
    for (const auto r_c : spec.r_c_values) {
      for (const auto m : spec.m_values) {
        for (std::uint32_t k = 0; k < spec.replicates; ++k) jobs.push_back({r_g, r_c, m, k});
      }
    }
  }
  return jobs;
}

SweepCellResult run_sweep_job(const SweepSpec& spec, const SweepJob& job,
                              const TrendThresholds& thresholds,
                              std::vector<GenerationRecord>* records) {
  SweepCellResult r;
  r.r_c = job.r_c;
  r.m = job.m;
  r.r_g = job.r_g;
  r.replicate = job.replicate;
  r.seed = derive_seed(spec.base_seed, job.r_c, job.m, job.r_g, job.replicate);

  SimulationResult sim = run_simulation(job_environment(spec, job), r.seed);
  std::vector<double> s;
  std::vector<double> q;
  for (const auto& member : sim.final_population) {
    s.push_back(member.s);
    q.push_back(member.q);
  }
  r.final_median_s = median(s);
  r.final_median_q = median(q);
  r.trend = classify_trend(r.final_median_s, r.final_median_q, thresholds);
  if (records != nullptr) *records = std::move(sim.records);
  return r;
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                       const SweepOptions& options) {
  spec.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const Json spec_json = to_json(spec);
  const auto manifest_path = out_dir / kManifest;
  std::map<SweepJob, SweepCellResult> done = load_manifest(manifest_path, spec_json);
  const bool fresh_manifest = !std::filesystem::exists(manifest_path);

  std::ofstream manifest(manifest_path, std::ios::app);
  if (!manifest) throw IoError("cannot open " + manifest_path.string());
  if (fresh_manifest) {
    manifest << Json{{std::string(kMetaKey), options.metadata}, {"spec", spec_json}}.dump() << '\n';
    manifest.flush();
    if (!manifest) throw IoError("cannot write " + manifest_path.string());
  }

  std::vector<SweepJob> pending;
  for (const auto& job : sweep_jobs(spec)) {
    if (!done.contains(job)) pending.push_back(job);
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> claimed{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex sink;
  std::size_t newly_completed = 0;

  auto worker = [&] {
    while (!failed.load()) {
      if (options.max_new_runs != 0 && claimed.fetch_add(1) >= options.max_new_runs) return;
      const std::size_t index = next.fetch_add(1);
      if (index >= pending.size()) return;
      const SweepJob& job = pending[index];
      try {
        std::vector<GenerationRecord> records;
        const SweepCellResult r = run_sweep_job(spec, job, options.thresholds, &records);
        write_file_atomic(records_path(out_dir, job), records_jsonl(records, options.metadata));

        std::lock_guard lock(sink);
        manifest << to_json(r).dump() << '\n';
        manifest.flush();
        if (!manifest) throw IoError("cannot append to " + manifest_path.string());
        done[job] = r;
        ++newly_completed;
      } catch (...) {
        std::lock_guard lock(sink);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(options.parallelism,
                                                           static_cast<unsigned>(pending.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  SweepOutcome outcome;
  outcome.newly_completed = newly_completed;
  outcome.results.reserve(done.size());
  for (const auto& [job, r] : done) outcome.results.push_back(r);
  outcome.complete = outcome.results.size() == spec.run_count();
  if (outcome.complete) {
    // Lines were appended in completion order; once the grid is done the
    // manifest is rewritten in job order so finished output does not depend
    // on scheduling or on where earlier invocations stopped.
    manifest.close();
    const std::string existing = read_file(manifest_path);
    std::string canonical = existing.substr(0, existing.find('\n') + 1);
    for (const auto& r : outcome.results) canonical += to_json(r).dump() + '\n';
    if (canonical != existing) write_file_atomic(manifest_path, canonical);
    write_file_atomic(out_dir / kResultsCsv, sweep_results_csv(outcome.results, options.metadata));
  }
  return outcome;
}

Json to_json(const SweepCellResult& r) {
  return Json{{"r_g", r.r_g},
              {"r_c", r.r_c},
              {"m", r.m},
              {"replicate", r.replicate},
              {"seed", r.seed},
              {"final_median_s", r.final_median_s},
              {"final_median_q", r.final_median_q},
              {"trend", to_string(r.trend)}};
}

SweepCellResult sweep_cell_result_from_json(const Json& j) {
  SweepCellResult r;
  r.r_g = j.at("r_g").get<std::uint32_t>();
  r.r_c = j.at("r_c").get<std::uint32_t>();
  r.m = j.at("m").get<std::uint32_t>();
  r.replicate = j.at("replicate").get<std::uint32_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.final_median_s = j.at("final_median_s").get<double>();
  r.final_median_q = j.at("final_median_q").get<double>();
  r.trend = trend_from_string(j.at("trend").get<std::string>());
  return r;
}

std::string sweep_results_csv(const std::vector<SweepCellResult>& results, const Json& metadata) {
  std::vector<SweepCellResult> sorted = results;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.job() < b.job(); });
  std::string out = csv_metadata_line(metadata);
  out += kSweepCsvHeader;
  out += '\n';
  for (const auto& r : sorted) {
    out += std::to_string(r.r_g) + ',' + std::to_string(r.r_c) + ',' + std::to_string(r.m) + ',' +
           std::to_string(r.replicate) + ',' + std::to_string(r.seed) + ',' +
           format_double(r.final_median_s) + ',' + format_double(r.final_median_q) + ',' +
           std::string(to_string(r.trend)) + '\n';
  }
  return out;
}

std::vector<SweepCellResult> parse_sweep_results_csv(std::string_view text) {
  std::vector<SweepCellResult> out;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != kSweepCsvHeader) throw std::invalid_argument("unexpected sweep CSV header: " + line);
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 8) throw std::invalid_argument("sweep CSV row has wrong field count: " + line);
    SweepCellResult r;
    r.r_g = parse_number<std::uint32_t>(fields[0]);
    r.r_c = parse_number<std::uint32_t>(fields[1]);
    r.m = parse_number<std::uint32_t>(fields[2]);
    r.replicate = parse_number<std::uint32_t>(fields[3]);
    r.seed = parse_number<std::uint64_t>(fields[4]);
    r.final_median_s = parse_number<double>(fields[5]);
    r.final_median_q = parse_number<double>(fields[6]);
    r.trend = trend_from_string(fields[7]);
    out.push_back(r);
  }
  if (!header_seen) throw std::invalid_argument("sweep CSV has no header");
  return out;
}

std::vector<SweepCellResult> read_sweep_results_csv(const std::filesystem::path& path) {
  return parse_sweep_results_csv(read_file(path));
}

}  // namespace groomsim
