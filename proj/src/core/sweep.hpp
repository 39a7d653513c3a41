#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/serialize.hpp"
#include "core/trend.hpp"
#include "core/types.hpp"

namespace groomsim {

// Experiment grid: every (r_g, r_c, m) combination, `replicates` times.
struct SweepSpec {
  std::vector<std::uint32_t> r_c_values;
  std::vector<std::uint32_t> m_values;
  std::vector<std::uint32_t> r_g_values;
  std::uint32_t replicates = 30;
  std::uint64_t base_seed = 0;
  std::uint32_t n_groomers = 100;
  std::uint32_t t_generations = 200;
  KernelScope kernel_scope = KernelScope::AllGroomees;

  // R_c in {5..50 step 5}, M in {5..200 step 5}, R_g in {100, 300},
  // 30 replicates, N = 100, T = 200.
  static SweepSpec reference_grid();

  // Throws std::invalid_argument on an empty or non-increasing value list
  // or a zero count.
  void validate() const;

  std::size_t run_count() const {
    return r_c_values.size() * m_values.size() * r_g_values.size() * replicates;
  }
};

Json to_json(const SweepSpec& spec);
// Field names as in SweepSpec; `fixed` holds {"n_groomers", "t_generations"}.
SweepSpec sweep_spec_from_json(const Json& j);

struct SweepJob {
  std::uint32_t r_g = 0;
  std::uint32_t r_c = 0;
  std::uint32_t m = 0;
  std::uint32_t replicate = 0;

  friend auto operator<=>(const SweepJob&, const SweepJob&) = default;
};

struct SweepCellResult {
  std::uint32_t r_c = 0;
  std::uint32_t m = 0;
  std::uint32_t r_g = 0;
  std::uint32_t replicate = 0;
  std::uint64_t seed = 0;
  double final_median_s = 0.0;
  double final_median_q = 0.0;
  TrendLabel trend = TrendLabel::Trend1;

  SweepJob job() const { return {r_g, r_c, m, replicate}; }
  friend bool operator==(const SweepCellResult&, const SweepCellResult&) = default;
};

// Seed of one simulation in a sweep:
//   h = splitmix64(base_seed)
//   h = splitmix64(h ^ r_g); h = splitmix64(h ^ r_c); h = splitmix64(h ^ m)
//   seed = splitmix64(h ^ replicate)
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint32_t r_c, std::uint32_t m,
                          std::uint32_t r_g, std::uint32_t replicate);

// All jobs of the grid in (r_g, r_c, m, replicate) order.
std::vector<SweepJob> sweep_jobs(const SweepSpec& spec);

// Runs one job and classifies its final population.
SweepCellResult run_sweep_job(const SweepSpec& spec, const SweepJob& job,
                              const TrendThresholds& thresholds,
                              std::vector<GenerationRecord>* records = nullptr);

struct SweepOptions {
  unsigned parallelism = 1;
  // Metadata written at the head of every emitted file.
  Json metadata = Json::object();
  // Stop handing out jobs after this many new completions (0: no limit).
  std::size_t max_new_runs = 0;
  TrendThresholds thresholds;
};

struct SweepOutcome {
  // Every finished result (earlier runs included), sorted by job.
  std::vector<SweepCellResult> results;
  std::size_t newly_completed = 0;
  bool complete = false;
};

// Runs the grid into out_dir:
//   manifest.jsonl                       one line per finished simulation
//   sweep/<r_g>/<r_c>_<m>/rep<k>.jsonl   generation records of each run
//   results.csv                          written once every job is done
// Jobs already listed in the manifest are not rerun, so an interrupted
// sweep resumes where it stopped. Output does not depend on parallelism.
// Throws IoError on persistence failure and std::invalid_argument if
// out_dir holds a manifest for a different spec.
SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                       const SweepOptions& options = {});

inline constexpr std::string_view kSweepCsvHeader =
    "r_g,r_c,m,replicate,seed,final_median_s,final_median_q,trend";

std::string sweep_results_csv(const std::vector<SweepCellResult>& results, const Json& metadata);
std::vector<SweepCellResult> parse_sweep_results_csv(std::string_view text);
std::vector<SweepCellResult> read_sweep_results_csv(const std::filesystem::path& path);

Json to_json(const SweepCellResult& r);
SweepCellResult sweep_cell_result_from_json(const Json& j);

}  // namespace groomsim
