#include "groomsim/groomsim.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "core/analysis.hpp"
#include "core/evolution.hpp"
#include "core/report.hpp"
#include "core/serialize.hpp"
#include "core/sweep.hpp"
#include "core/trend.hpp"

struct gs_result {
  groomsim::SimulationResult value;
};

struct gs_gradient_field {
  std::vector<groomsim::GradientCell> cells;
};

struct gs_orbit {
  std::vector<groomsim::OrbitPoint> points;
};

namespace {

using groomsim::Json;

thread_local std::string last_error;

gs_status fail(gs_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <class Body>
gs_status guarded(Body&& body) {
  try {
    body();
    return GS_OK;
  } catch (const groomsim::DomainError& e) {
    return fail(GS_ERR_DOMAIN, e.what());
  } catch (const groomsim::IoError& e) {
    return fail(GS_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(GS_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(GS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(GS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const Json::exception& e) {
    return fail(GS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GS_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) throw std::invalid_argument(std::string(name) + " must not be NULL");
}

groomsim::Environment to_core(const gs_environment* env) {
  require(env, "env");
  groomsim::Environment out;
  out.n_groomers = env->n_groomers;
  out.n_groomees = env->n_groomees;
  out.r_c = env->r_c;
  out.r_g = env->r_g;
  out.t_generations = env->t_generations;
  switch (env->kernel_scope) {
    case GS_KERNEL_ALL_GROOMEES: out.kernel_scope = groomsim::KernelScope::AllGroomees; break;
    case GS_KERNEL_EXISTING_PARTNERS:
      out.kernel_scope = groomsim::KernelScope::ExistingPartners;
      break;
    default: throw std::invalid_argument("unknown kernel_scope " + std::to_string(env->kernel_scope));
  }
  out.validate();
  return out;
}

gs_environment to_c(const groomsim::Environment& env) {
  return {env.n_groomers, env.n_groomees, env.r_c, env.r_g, env.t_generations,
          env.kernel_scope == groomsim::KernelScope::AllGroomees ? GS_KERNEL_ALL_GROOMEES
                                                                 : GS_KERNEL_EXISTING_PARTNERS};
}

groomsim::TrendThresholds to_core(const gs_trend_thresholds* t) {
  if (t == nullptr) return {};
  return {t->s_high, t->s_low, t->q_split};
}

Json metadata_of(const char* metadata_json) {
  if (metadata_json == nullptr || *metadata_json == '\0') return Json::object();
  Json j;
  try {
    j = Json::parse(metadata_json);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("metadata is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("metadata must be a JSON object");
  return j;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::pair<double, double> final_medians(const groomsim::SimulationResult& r) {
  std::vector<double> s;
  std::vector<double> q;
  for (const auto& m : r.final_population) {
    s.push_back(m.s);
    q.push_back(m.q);
  }
  return {groomsim::median(s), groomsim::median(q)};
}

}  // namespace

extern "C" {

const char* gs_version(void) { return groomsim::kVersion.data(); }

const char* gs_last_error(void) { return last_error.c_str(); }

void gs_string_free(char* s) { std::free(s); }

void gs_environment_defaults(gs_environment* env) {
  if (env != nullptr) *env = to_c(groomsim::Environment{});
}

gs_status gs_environment_validate(const gs_environment* env) {
  return guarded([&] { to_core(env); });
}

gs_status gs_simulate(const gs_environment* env, uint64_t seed, int capture_event_log,
                      gs_result** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto result = std::make_unique<gs_result>();
    result->value = groomsim::run_simulation(to_core(env), seed, capture_event_log != 0);
    *out = result.release();
  });
}

gs_status gs_result_load(const char* path, gs_result** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto result = std::make_unique<gs_result>();
    result->value = groomsim::simulation_result_from_json(groomsim::read_json_file(path));
    *out = result.release();
  });
}

void gs_result_free(gs_result* result) { delete result; }

gs_status gs_result_environment(const gs_result* result, gs_environment* out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    *out = to_c(result->value.env);
  });
}

uint64_t gs_result_seed(const gs_result* result) { return result ? result->value.seed : 0; }

size_t gs_result_record_count(const gs_result* result) {
  return result ? result->value.records.size() : 0;
}

gs_status gs_result_record(const gs_result* result, size_t index, gs_generation_record* out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    const auto& r = result->value.records.at(index);
    *out = {r.generation, r.mean_s,   r.median_s,      r.var_s,      r.mean_q,
            r.median_q,   r.var_q,    r.total_fitness, r.max_fitness};
  });
}

size_t gs_result_population_size(const gs_result* result) {
  return result ? result->value.final_population.size() : 0;
}

gs_status gs_result_member(const gs_result* result, size_t index, double* s, double* q) {
  return guarded([&] {
    require(result, "result");
    const auto& m = result->value.final_population.at(index);
    if (s != nullptr) *s = m.s;
    if (q != nullptr) *q = m.q;
  });
}

gs_status gs_result_final_medians(const gs_result* result, double* median_s, double* median_q) {
  return guarded([&] {
    require(result, "result");
    const auto [s, q] = final_medians(result->value);
    if (median_s != nullptr) *median_s = s;
    if (median_q != nullptr) *median_q = q;
  });
}

gs_status gs_result_final_w(const gs_result* result, size_t i, size_t j, uint32_t* out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    const auto& w = result->value.final_w;
    if (i >= w.rows() || j >= w.cols()) throw std::out_of_range("final_w index out of range");
    *out = w(i, j);
  });
}

int gs_result_has_event_log(const gs_result* result) {
  return result != nullptr && result->value.grooming_event_log.has_value();
}

gs_status gs_result_write(const gs_result* result, const char* out_dir, const char* metadata_json) {
  return guarded([&] {
    require(result, "result");
    require(out_dir, "out_dir");
    const Json meta = metadata_of(metadata_json);
    const std::filesystem::path dir(out_dir);
    groomsim::write_file_atomic(dir / "result.json", groomsim::to_json(result->value, meta).dump(2) + "\n");
    groomsim::write_file_atomic(dir / "records.jsonl", groomsim::records_jsonl(result->value.records, meta));
  });
}

gs_status gs_result_to_json(const gs_result* result, const char* metadata_json, char** out_json) {
  return guarded([&] {
    require(result, "result");
    require(out_json, "out_json");
    *out_json = copy_string(groomsim::to_json(result->value, metadata_of(metadata_json)).dump());
  });
}

void gs_trend_thresholds_defaults(gs_trend_thresholds* thresholds) {
  if (thresholds == nullptr) return;
  const groomsim::TrendThresholds t;
  *thresholds = {t.s_high, t.s_low, t.q_split};
}

gs_status gs_classify_trend(double median_s, double median_q, const gs_trend_thresholds* thresholds,
                            int* trend) {
  return guarded([&] {
    require(trend, "trend");
    *trend = static_cast<int>(groomsim::classify_trend(median_s, median_q, to_core(thresholds)));
  });
}

uint64_t gs_derive_seed(uint64_t base_seed, uint32_t r_c, uint32_t m, uint32_t r_g,
                        uint32_t replicate) {
  return groomsim::derive_seed(base_seed, r_c, m, r_g, replicate);
}

gs_status gs_sweep_run(const char* spec_json, const char* out_dir, const char* metadata_json,
                       unsigned parallelism, uint64_t max_new_runs,
                       const gs_trend_thresholds* thresholds, int* complete,
                       uint64_t* total_finished) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out_dir, "out_dir");
    Json spec_doc;
    try {
      spec_doc = Json::parse(spec_json);
    } catch (const Json::parse_error& e) {
      throw std::invalid_argument(std::string("sweep spec is not valid JSON: ") + e.what());
    }
    groomsim::SweepOptions options;
    options.parallelism = parallelism == 0 ? 1 : parallelism;
    options.metadata = metadata_of(metadata_json);
    options.max_new_runs = static_cast<std::size_t>(max_new_runs);
    options.thresholds = to_core(thresholds);
    const auto outcome =
        groomsim::run_sweep(groomsim::sweep_spec_from_json(spec_doc), out_dir, options);
    if (complete != nullptr) *complete = outcome.complete ? 1 : 0;
    if (total_finished != nullptr) *total_finished = outcome.results.size();
  });
}

gs_status gs_agos_cell(const gs_environment* env, double s, double q, uint32_t replicates,
                       double sample_sigma, uint64_t seed, gs_gradient_cell* out) {
  return guarded([&] {
    require(out, "out");
    if (!(sample_sigma >= 0.0)) throw std::invalid_argument("sample_sigma must be >= 0");
    groomsim::Rng rng(seed);
    const auto c = groomsim::agos_cell(s, q, to_core(env), replicates, rng,
                                       {sample_sigma, sample_sigma});
    *out = {c.s_center, c.q_center, c.ds, c.dq, c.replicates};
  });
}

gs_status gs_agos_grid(const gs_environment* env, const gs_range* s_range, const gs_range* q_range,
                       uint32_t replicates, double sample_sigma, uint64_t seed,
                       unsigned parallelism, gs_gradient_field** out) {
  return guarded([&] {
    require(s_range, "s_range");
    require(q_range, "q_range");
    require(out, "out");
    *out = nullptr;
    if (!(sample_sigma >= 0.0)) throw std::invalid_argument("sample_sigma must be >= 0");
    if (replicates < 1) throw std::invalid_argument("replicates must be >= 1");
    groomsim::Rng rng(seed);
    auto field = std::make_unique<gs_gradient_field>();
    field->cells = groomsim::agos_grid({s_range->low, s_range->high, s_range->step},
                                       {q_range->low, q_range->high, q_range->step}, to_core(env),
                                       replicates, rng, parallelism == 0 ? 1 : parallelism,
                                       {sample_sigma, sample_sigma});
    *out = field.release();
  });
}

size_t gs_gradient_field_size(const gs_gradient_field* field) {
  return field ? field->cells.size() : 0;
}

gs_status gs_gradient_field_cell(const gs_gradient_field* field, size_t index,
                                 gs_gradient_cell* out) {
  return guarded([&] {
    require(field, "field");
    require(out, "out");
    const auto& c = field->cells.at(index);
    *out = {c.s_center, c.q_center, c.ds, c.dq, c.replicates};
  });
}

gs_status gs_gradient_field_write_csv(const gs_gradient_field* field, const char* path,
                                      const char* metadata_json) {
  return guarded([&] {
    require(field, "field");
    require(path, "path");
    groomsim::write_file_atomic(path, groomsim::report::gradient_csv(field->cells, metadata_of(metadata_json)));
  });
}

void gs_gradient_field_free(gs_gradient_field* field) { delete field; }

gs_status gs_orbit_integrate(const gs_environment* env, double s0, double q0, uint32_t steps,
                             double noise_sigma, uint32_t replicates_per_step, uint64_t seed,
                             gs_orbit** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
    if (replicates_per_step < 1) throw std::invalid_argument("replicates_per_step must be >= 1");
    if (!(q0 >= 0.0 && q0 <= 1.0)) throw std::invalid_argument("q0 must lie in [0, 1]");
    groomsim::Rng rng(seed);
    auto orbit = std::make_unique<gs_orbit>();
    orbit->points = groomsim::integrate_orbit({s0, q0}, to_core(env), steps, noise_sigma,
                                              replicates_per_step, rng);
    *out = orbit.release();
  });
}

size_t gs_orbit_size(const gs_orbit* orbit) { return orbit ? orbit->points.size() : 0; }

gs_status gs_orbit_point(const gs_orbit* orbit, size_t index, double* s, double* q) {
  return guarded([&] {
    require(orbit, "orbit");
    const auto& p = orbit->points.at(index);
    if (s != nullptr) *s = p.s;
    if (q != nullptr) *q = p.q;
  });
}

gs_status gs_orbit_write_csv(const gs_orbit* orbit, const char* path, const char* metadata_json) {
  return guarded([&] {
    require(orbit, "orbit");
    require(path, "path");
    groomsim::write_file_atomic(path, groomsim::report::orbit_csv(orbit->points, metadata_of(metadata_json)));
  });
}

void gs_orbit_free(gs_orbit* orbit) { delete orbit; }

gs_status gs_strength_summary_of(const gs_result* result, gs_strength_summary* out) {
  return guarded([&] {
    require(result, "result");
    require(out, "out");
    const auto dist = groomsim::strength_distribution(result->value.final_w);
    std::uint64_t n = 0;
    for (const auto& [w, count] : dist.histogram) n += count;
    *out = {n, dist.max_w, dist.median_w, dist.powerlaw_slope, dist.powerlaw_r2};
  });
}

gs_status gs_analyze_result(const gs_result* result, const char* out_dir, const char* metadata_json,
                            const gs_trend_thresholds* thresholds) {
  return guarded([&] {
    require(result, "result");
    require(out_dir, "out_dir");
    namespace report = groomsim::report;
    const Json meta = metadata_of(metadata_json);
    const std::filesystem::path dir(out_dir);
    const auto& r = result->value;

    const auto [s, q] = final_medians(r);
    const auto trend = groomsim::classify_trend(s, q, to_core(thresholds));
    groomsim::write_file_atomic(dir / "trend.csv", report::trend_csv(s, q, trend, meta));

    const auto dist = groomsim::strength_distribution(r.final_w);
    groomsim::write_file_atomic(dir / "strength_histogram.csv", report::histogram_csv(dist, meta));
    groomsim::write_file_atomic(dir / "strength_ccdf.csv", report::ccdf_csv(dist, meta));
    groomsim::write_file_atomic(dir / "strength_fit.json", report::fit_json(dist, meta));

    if (r.grooming_event_log) {
      const auto rows = groomsim::strategy_profile(*r.grooming_event_log);
      groomsim::write_file_atomic(dir / "profile.csv", report::profile_csv(rows, meta));
    }
  });
}

gs_status gs_analyze_sweep(const char* results_csv, uint32_t r_g, const char* out_dir,
                           const char* metadata_json) {
  return guarded([&] {
    require(results_csv, "results_csv");
    require(out_dir, "out_dir");
    namespace report = groomsim::report;
    const Json meta = metadata_of(metadata_json);
    const std::filesystem::path dir(out_dir);
    const auto results = groomsim::read_sweep_results_csv(results_csv);
    groomsim::write_file_atomic(dir / "trend_frequencies.csv",
                                report::trend_frequency_csv(groomsim::trend_frequencies(results), meta));
    groomsim::write_file_atomic(dir / "transition.csv",
                                report::transition_csv(groomsim::transition_curve(results, r_g), meta));
  });
}

}  // extern "C"
