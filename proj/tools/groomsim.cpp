// groomsim command-line front end. Talks to the library only through the C API.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "groomsim/groomsim.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Thrown after a failed library call; carries the exit code to use.
struct Failure {
  int exit_code;
  std::string message;
};

void check(gs_status status, const std::string& context) {
  if (status == GS_OK) return;
  const int code = status == GS_ERR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
  throw Failure{code, context + ": " + gs_last_error()};
}

// --config files are JSON objects keyed by long flag names without dashes,
// e.g. {"rc": 5, "m": 45, "seed": 7}. Their entries are spliced in as
// --name=value right after the subcommand, so flags given on the command line
// (which come later and use the take-last policy) win. Unknown keys surface
// as ordinary unknown-flag errors.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::size_t sub = 1;
  while (sub < args.size() && args[sub].starts_with("-")) ++sub;
  if (sub >= args.size()) return args;

  std::string path;
  for (std::size_t i = sub + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read config " + path};
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Failure{kExitUsage, "config is not valid JSON: " + std::string(e.what())};
  }
  if (!j.is_object()) throw Failure{kExitUsage, "config must be a JSON object"};

  std::vector<std::string> extra;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw Failure{kExitUsage, "config files cannot name another config"};
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_boolean() || value.is_number()) {
      text = value.dump();
    } else {
      throw Failure{kExitUsage, "config value for '" + key + "' must be a scalar"};
    }
    extra.push_back("--" + key + "=" + text);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub) + 1, extra.begin(), extra.end());
  return args;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Common {
  std::uint64_t seed = 0;
  std::string out = ".";
  bool reproducible = false;
  std::string config;
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--seed", common.seed, "Random seed");
  cmd->add_option("--out", common.out, "Output directory");
  cmd->add_flag("--reproducible", common.reproducible,
                "Omit the wall-clock timestamp from output metadata");
  cmd->add_option("--config", common.config, "JSON file of flag values (keys are flag names)");
}

struct EnvFlags {
  gs_environment env{};
  std::string kernel_scope = "all_groomees";
};

void add_env(CLI::App* cmd, EnvFlags& flags, bool with_t) {
  gs_environment_defaults(&flags.env);
  cmd->add_option("--rc", flags.env.r_c, "Cooperation slots per groomee (R_c)")
      ->required()
      ->default_str("");
  cmd->add_option("--m", flags.env.n_groomees, "Number of groomees (M)")->required()->default_str("");
  cmd->add_option("--rg", flags.env.r_g, "Grooming actions per groomer per generation (R_g)");
  cmd->add_option("--n", flags.env.n_groomers, "Number of groomers (N)");
  if (with_t) cmd->add_option("--t", flags.env.t_generations, "Generations (T)");
  cmd->add_option("--kernel-scope", flags.kernel_scope,
                  "Candidates the partner kernel normalizes over")
      ->check(CLI::IsMember({"all_groomees", "existing_partners"}));
}

gs_environment resolve_env(const EnvFlags& flags) {
  gs_environment env = flags.env;
  env.kernel_scope =
      flags.kernel_scope == "existing_partners" ? GS_KERNEL_EXISTING_PARTNERS : GS_KERNEL_ALL_GROOMEES;
  check(gs_environment_validate(&env), "invalid configuration");
  return env;
}

Json env_json(const gs_environment& env) {
  return {{"n_groomers", env.n_groomers},
          {"n_groomees", env.n_groomees},
          {"r_c", env.r_c},
          {"r_g", env.r_g},
          {"t_generations", env.t_generations},
          {"kernel_scope",
           env.kernel_scope == GS_KERNEL_EXISTING_PARTNERS ? "existing_partners" : "all_groomees"}};
}

struct ThresholdFlags {
  gs_trend_thresholds t{};
};

void add_thresholds(CLI::App* cmd, ThresholdFlags& flags) {
  gs_trend_thresholds_defaults(&flags.t);
  cmd->add_option("--s-high", flags.t.s_high, "Median s at or above which a run is trend 1");
  cmd->add_option("--s-low", flags.t.s_low, "Median s below which a run is trend 4");
  cmd->add_option("--q-split", flags.t.q_split, "Median q splitting trend 2 (>=) from trend 3");
}

Json thresholds_json(const gs_trend_thresholds& t) {
  return {{"s_high", t.s_high}, {"s_low", t.s_low}, {"q_split", t.q_split}};
}

std::string metadata(const std::string& command, const Json& config, std::uint64_t seed,
                     const Common& common) {
  Json meta{{"version", gs_version()}, {"command", command}, {"config", config}, {"seed", seed}};
  if (!common.reproducible) meta["timestamp"] = utc_timestamp();
  return meta.dump();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitUsage, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------------------

struct RunCmd {
  Common common;
  EnvFlags env;
  bool event_log = false;
};

int do_run(const RunCmd& cmd) {
  const gs_environment env = resolve_env(cmd.env);
  Json config = env_json(env);
  config["event_log"] = cmd.event_log;
  const std::string meta = metadata("run", config, cmd.common.seed, cmd.common);

  gs_result* raw = nullptr;
  check(gs_simulate(&env, cmd.common.seed, cmd.event_log ? 1 : 0, &raw), "simulation failed");
  std::unique_ptr<gs_result, decltype(&gs_result_free)> result(raw, gs_result_free);
  check(gs_result_write(result.get(), cmd.common.out.c_str(), meta.c_str()), "writing results failed");

  double s = 0.0;
  double q = 0.0;
  int trend = 0;
  check(gs_result_final_medians(result.get(), &s, &q), "summary failed");
  check(gs_classify_trend(s, q, nullptr, &trend), "summary failed");
  std::cout << "final median s=" << s << " q=" << q << " trend" << trend << "\n";
  return 0;
}

struct SweepCmd {
  Common common;
  ThresholdFlags thresholds;
  std::string spec_path;
  unsigned jobs = default_jobs();
  std::uint64_t stop_after = 0;
};

int do_sweep(const SweepCmd& cmd, bool seed_given) {
  Json spec;
  try {
    spec = Json::parse(read_text(cmd.spec_path));
  } catch (const Json::parse_error& e) {
    throw Failure{kExitUsage, "sweep spec is not valid JSON: " + std::string(e.what())};
  }
  if (!spec.is_object()) throw Failure{kExitUsage, "sweep spec must be a JSON object"};
  if (seed_given) spec["base_seed"] = cmd.common.seed;
  const std::uint64_t base_seed = spec.value("base_seed", std::uint64_t{0});

  Json config{{"spec", spec}, {"thresholds", thresholds_json(cmd.thresholds.t)}};
  const std::string meta = metadata("sweep", config, base_seed, cmd.common);

  int complete = 0;
  std::uint64_t finished = 0;
  check(gs_sweep_run(spec.dump().c_str(), cmd.common.out.c_str(), meta.c_str(), cmd.jobs,
                     cmd.stop_after, &cmd.thresholds.t, &complete, &finished),
        "sweep failed");
  if (complete) {
    std::cout << "sweep complete: " << finished << " runs, results in "
              << (std::filesystem::path(cmd.common.out) / "results.csv").string() << "\n";
  } else {
    std::cout << "sweep stopped with " << finished << " runs finished; rerun to resume\n";
  }
  return 0;
}

struct AgosCmd {
  Common common;
  EnvFlags env;
  gs_range s_range{-4.0, 4.0, 0.5};
  gs_range q_range{0.0, 1.0, 0.05};
  std::uint32_t replicates = 30;
  double sigma = 0.2;
  unsigned jobs = default_jobs();
};

int do_agos(const AgosCmd& cmd) {
  const gs_environment env = resolve_env(cmd.env);
  Json config{{"env", env_json(env)},
              {"s_range", {cmd.s_range.low, cmd.s_range.high, cmd.s_range.step}},
              {"q_range", {cmd.q_range.low, cmd.q_range.high, cmd.q_range.step}},
              {"replicates", cmd.replicates},
              {"sigma", cmd.sigma}};
  const std::string meta = metadata("agos", config, cmd.common.seed, cmd.common);

  gs_gradient_field* raw = nullptr;
  check(gs_agos_grid(&env, &cmd.s_range, &cmd.q_range, cmd.replicates, cmd.sigma, cmd.common.seed,
                     cmd.jobs, &raw),
        "gradient estimation failed");
  std::unique_ptr<gs_gradient_field, decltype(&gs_gradient_field_free)> field(raw,
                                                                             gs_gradient_field_free);
  const auto path = std::filesystem::path(cmd.common.out) / "gradient.csv";
  check(gs_gradient_field_write_csv(field.get(), path.c_str(), meta.c_str()), "writing gradient failed");
  std::cout << gs_gradient_field_size(field.get()) << " cells written to " << path.string() << "\n";
  return 0;
}

struct OrbitCmd {
  Common common;
  EnvFlags env;
  double s0 = 0.0;
  double q0 = 0.5;
  std::uint32_t steps = 200;
  double noise = 0.01;
  std::uint32_t replicates = 30;
};

int do_orbit(const OrbitCmd& cmd) {
  const gs_environment env = resolve_env(cmd.env);
  Json config{{"env", env_json(env)}, {"s0", cmd.s0},       {"q0", cmd.q0},
              {"steps", cmd.steps},   {"noise", cmd.noise}, {"replicates", cmd.replicates}};
  const std::string meta = metadata("orbit", config, cmd.common.seed, cmd.common);

  gs_orbit* raw = nullptr;
  check(gs_orbit_integrate(&env, cmd.s0, cmd.q0, cmd.steps, cmd.noise, cmd.replicates,
                           cmd.common.seed, &raw),
        "orbit integration failed");
  std::unique_ptr<gs_orbit, decltype(&gs_orbit_free)> orbit(raw, gs_orbit_free);
  const auto path = std::filesystem::path(cmd.common.out) / "orbit.csv";
  check(gs_orbit_write_csv(orbit.get(), path.c_str(), meta.c_str()), "writing orbit failed");
  double s = 0.0;
  double q = 0.0;
  check(gs_orbit_point(orbit.get(), gs_orbit_size(orbit.get()) - 1, &s, &q), "orbit failed");
  std::cout << "orbit end s=" << s << " q=" << q << ", written to " << path.string() << "\n";
  return 0;
}

struct AnalyzeCmd {
  Common common;
  ThresholdFlags thresholds;
  std::string result_path;
  std::string sweep_path;
  std::uint32_t r_g = 300;
};

int do_analyze(const AnalyzeCmd& cmd) {
  if (cmd.result_path.empty() && cmd.sweep_path.empty()) {
    throw Failure{kExitUsage, "analyze needs --result and/or --sweep"};
  }
  Json config{{"result", cmd.result_path},
              {"sweep", cmd.sweep_path},
              {"rg", cmd.r_g},
              {"thresholds", thresholds_json(cmd.thresholds.t)}};
  const std::string meta = metadata("analyze", config, cmd.common.seed, cmd.common);

  if (!cmd.result_path.empty()) {
    gs_result* raw = nullptr;
    check(gs_result_load(cmd.result_path.c_str(), &raw), "loading result failed");
    std::unique_ptr<gs_result, decltype(&gs_result_free)> result(raw, gs_result_free);
    check(gs_analyze_result(result.get(), cmd.common.out.c_str(), meta.c_str(), &cmd.thresholds.t),
          "result analysis failed");
  }
  if (!cmd.sweep_path.empty()) {
    check(gs_analyze_sweep(cmd.sweep_path.c_str(), cmd.r_g, cmd.common.out.c_str(), meta.c_str()),
          "sweep analysis failed");
  }
  std::cout << "analysis written to " << cmd.common.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolution of social grooming strategies"};
  app.set_version_flag("--version", std::string(gs_version()));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  RunCmd run;
  auto* run_app = app.add_subcommand("run", "Run one simulation; writes result.json and records.jsonl");
  add_common(run_app, run.common);
  add_env(run_app, run.env, true);
  run_app->add_flag("--event-log", run.event_log,
                    "Record final-generation partner choices (needed for profile.csv)");

  SweepCmd sweep;
  auto* sweep_app = app.add_subcommand("sweep", "Run or resume a parameter sweep from a spec file");
  add_common(sweep_app, sweep.common);
  add_thresholds(sweep_app, sweep.thresholds);
  sweep_app->add_option("--spec", sweep.spec_path, "Sweep spec (JSON)")->required();
  sweep_app->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_app->add_option("--stop-after", sweep.stop_after,
                        "Stop after this many new runs (0: run to completion)");

  AgosCmd agos;
  auto* agos_app = app.add_subcommand("agos", "Average gradient of selection over an (s, q) lattice");
  add_common(agos_app, agos.common);
  add_env(agos_app, agos.env, false);
  agos_app->add_option("--s-min", agos.s_range.low, "Lowest s");
  agos_app->add_option("--s-max", agos.s_range.high, "Highest s");
  agos_app->add_option("--s-step", agos.s_range.step, "Step in s");
  agos_app->add_option("--q-min", agos.q_range.low, "Lowest q");
  agos_app->add_option("--q-max", agos.q_range.high, "Highest q");
  agos_app->add_option("--q-step", agos.q_range.step, "Step in q");
  agos_app->add_option("--replicates", agos.replicates, "Sampled populations per cell");
  agos_app->add_option("--sigma", agos.sigma, "Spread of sampled s and q (0: clone populations)");
  agos_app->add_option("--jobs", agos.jobs, "Worker threads")->check(CLI::PositiveNumber);

  OrbitCmd orbit;
  auto* orbit_app = app.add_subcommand("orbit", "Follow the selection gradient from a start point");
  add_common(orbit_app, orbit.common);
  add_env(orbit_app, orbit.env, false);
  orbit_app->add_option("--s0", orbit.s0, "Starting s");
  orbit_app->add_option("--q0", orbit.q0, "Starting q");
  orbit_app->add_option("--steps", orbit.steps, "Integration steps");
  orbit_app->add_option("--noise", orbit.noise, "Gaussian noise added per step and component");
  orbit_app->add_option("--replicates", orbit.replicates, "Sampled populations per gradient estimate");

  AnalyzeCmd analyze;
  auto* analyze_app = app.add_subcommand("analyze", "Trend, strength distribution, profile and transition tables");
  add_common(analyze_app, analyze.common);
  add_thresholds(analyze_app, analyze.thresholds);
  analyze_app->add_option("--result", analyze.result_path, "result.json from `run`");
  analyze_app->add_option("--sweep", analyze.sweep_path, "results.csv from `sweep`");
  analyze_app->add_option("--rg", analyze.r_g, "R_g slice used for the transition table");

  std::vector<std::string> args;
  try {
    args = expand_config({argv, argv + argc});
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
  std::vector<char*> expanded;
  for (auto& a : args) expanded.push_back(a.data());

  try {
    app.parse(static_cast<int>(expanded.size()), expanded.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (run_app->parsed()) return do_run(run);
    if (sweep_app->parsed()) return do_sweep(sweep, sweep_app->count("--seed") > 0);
    if (agos_app->parsed()) return do_agos(agos);
    if (orbit_app->parsed()) return do_orbit(orbit);
    if (analyze_app->parsed()) return do_analyze(analyze);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
