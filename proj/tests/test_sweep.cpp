#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "core/analysis.hpp"
#include "core/sweep.hpp"
#include "test_util.hpp"

using namespace groomsim;
namespace fs = std::filesystem;

namespace {

SweepSpec tiny_spec() {
  SweepSpec spec;
  spec.r_c_values = {5, 10};
  spec.m_values = {5, 10};
  spec.r_g_values = {20};
  spec.replicates = 2;
  spec.base_seed = 3;
  spec.n_groomers = 20;
  spec.t_generations = 6;
  return spec;
}

}  // namespace

TEST_CASE("derive_seed matches the frozen golden values") {
  const Json golden = read_json_file(fs::path(GROOMSIM_GOLDEN_DIR) / "derive_seed.json");
  REQUIRE(golden.size() >= 1);
  for (const auto& g : golden) {
    CHECK(derive_seed(g.at("base_seed").get<std::uint64_t>(), g.at("r_c").get<std::uint32_t>(),
                      g.at("m").get<std::uint32_t>(), g.at("r_g").get<std::uint32_t>(),
                      g.at("replicate").get<std::uint32_t>()) == g.at("seed").get<std::uint64_t>());
  }
  CHECK(derive_seed(0, 5, 5, 300, 0) == 6758477561062177993ULL);
}

TEST_CASE("derive_seed is deterministic and separates replicates") {
  CHECK(derive_seed(1, 2, 3, 4, 5) == derive_seed(1, 2, 3, 4, 5));
  std::set<std::uint64_t> seeds;
  for (std::uint32_t r = 0; r < 1000; ++r) seeds.insert(derive_seed(0, 15, 45, 300, r));
  CHECK(seeds.size() == 1000);
  // Swapping fields changes the seed.
  CHECK(derive_seed(0, 5, 10, 300, 0) != derive_seed(0, 10, 5, 300, 0));
}

TEST_CASE("reference grid cardinality") {
  SweepSpec spec = SweepSpec::reference_grid();
  CHECK(spec.r_c_values.size() == 10);
  CHECK(spec.m_values.size() == 40);
  CHECK(spec.replicates == 30);
  CHECK(spec.n_groomers == 100);
  CHECK(spec.t_generations == 200);
  spec.r_g_values = {300};
  CHECK(spec.run_count() == 12000);
  CHECK(sweep_jobs(spec).size() == 12000);
}

TEST_CASE("spec validation") {
  SweepSpec spec = tiny_spec();
  CHECK_NOTHROW(spec.validate());
  spec.m_values = {10, 5};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec();
  spec.r_c_values.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = tiny_spec();
  spec.replicates = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("spec JSON round trip and aliases") {
  const SweepSpec spec = tiny_spec();
  const SweepSpec back = sweep_spec_from_json(to_json(spec));
  CHECK(back.r_c_values == spec.r_c_values);
  CHECK(back.m_values == spec.m_values);
  CHECK(back.r_g_values == spec.r_g_values);
  CHECK(back.replicates == spec.replicates);
  CHECK(back.base_seed == spec.base_seed);
  CHECK(back.n_groomers == spec.n_groomers);
  CHECK(back.t_generations == spec.t_generations);

  const Json alias = Json::parse(
      R"({"r_c_values":[5],"m_values":[5],"r_g_values":[100],"replicates":1,"base_seed":0,"fixed":{"N":50,"T":10}})");
  const SweepSpec a = sweep_spec_from_json(alias);
  CHECK(a.n_groomers == 50);
  CHECK(a.t_generations == 10);
}

TEST_CASE("sweep cardinality and distinct seeds") {
  test_util::TempDir dir("sweep_card");
  const auto outcome = run_sweep(tiny_spec(), dir.path());
  CHECK(outcome.complete);
  CHECK(outcome.results.size() == 8);
  CHECK(outcome.newly_completed == 8);
  std::set<std::uint64_t> seeds;
  for (const auto& r : outcome.results) {
    seeds.insert(r.seed);
    CHECK(r.trend == classify_trend(r.final_median_s, r.final_median_q));
    CHECK(fs::exists(dir.path() / "sweep" / std::to_string(r.r_g) /
                     (std::to_string(r.r_c) + "_" + std::to_string(r.m)) /
                     ("rep" + std::to_string(r.replicate) + ".jsonl")));
  }
  CHECK(seeds.size() == 8);

  const std::string csv = read_file(dir.path() / "results.csv");
  CHECK(csv.starts_with("# "));
  CHECK(csv.find("\nr_g,r_c,m,replicate,seed,final_median_s,final_median_q,trend\n") !=
        std::string::npos);
  CHECK(parse_sweep_results_csv(csv) == outcome.results);
}

TEST_CASE("a sweep job equals a standalone simulation with the derived seed") {
  const SweepSpec spec = tiny_spec();
  const SweepJob job{20, 10, 5, 1};
  const auto r = run_sweep_job(spec, job, {});
  Environment env;
  env.n_groomers = spec.n_groomers;
  env.n_groomees = 5;
  env.r_c = 10;
  env.r_g = 20;
  env.t_generations = spec.t_generations;
  const auto sim = run_simulation(env, derive_seed(spec.base_seed, 10, 5, 20, 1));
  std::vector<double> s;
  for (const auto& m : sim.final_population) s.push_back(m.s);
  CHECK(r.seed == sim.seed);
  CHECK(r.final_median_s == median(s));
}

TEST_CASE("output does not depend on parallelism") {
  test_util::TempDir a("sweep_p1");
  test_util::TempDir b("sweep_p8");
  SweepOptions one;
  one.parallelism = 1;
  SweepOptions eight;
  eight.parallelism = 8;
  run_sweep(tiny_spec(), a.path(), one);
  run_sweep(tiny_spec(), b.path(), eight);
  CHECK(test_util::tree_contents(a.path()) == test_util::tree_contents(b.path()));
}

TEST_CASE("interrupted sweeps resume to byte-identical output") {
  test_util::TempDir whole("sweep_whole");
  test_util::TempDir parts("sweep_parts");
  SweepOptions options;
  options.parallelism = 3;
  run_sweep(tiny_spec(), whole.path(), options);

  options.max_new_runs = 3;
  auto first = run_sweep(tiny_spec(), parts.path(), options);
  CHECK_FALSE(first.complete);
  CHECK(first.newly_completed == 3);
  CHECK_FALSE(fs::exists(parts.path() / "results.csv"));
  auto second = run_sweep(tiny_spec(), parts.path(), options);
  CHECK(second.newly_completed == 3);
  CHECK(second.results.size() == 6);
  options.max_new_runs = 0;
  auto last = run_sweep(tiny_spec(), parts.path(), options);
  CHECK(last.complete);
  CHECK(last.newly_completed == 2);
  CHECK(test_util::tree_contents(whole.path()) == test_util::tree_contents(parts.path()));

  // Nothing left to do on a finished directory.
  CHECK(run_sweep(tiny_spec(), parts.path(), options).newly_completed == 0);
}

TEST_CASE("a torn trailing manifest line is ignored") {
  test_util::TempDir dir("sweep_torn");
  SweepOptions options;
  options.max_new_runs = 2;
  run_sweep(tiny_spec(), dir.path(), options);
  {
    std::ofstream out(dir.path() / "manifest.jsonl", std::ios::app);
    out << R"({"r_g":20,"r_c":5,"m":10,"repl)";
  }
  options.max_new_runs = 0;
  const auto outcome = run_sweep(tiny_spec(), dir.path(), options);
  CHECK(outcome.complete);
  CHECK(outcome.newly_completed == 6);

  test_util::TempDir clean("sweep_clean");
  run_sweep(tiny_spec(), clean.path());
  CHECK(read_file(dir.path() / "results.csv") == read_file(clean.path() / "results.csv"));
  CHECK(read_file(dir.path() / "manifest.jsonl") == read_file(clean.path() / "manifest.jsonl"));
}

TEST_CASE("a directory holding another spec is refused") {
  test_util::TempDir dir("sweep_other");
  run_sweep(tiny_spec(), dir.path());
  SweepSpec other = tiny_spec();
  other.base_seed = 4;
  CHECK_THROWS_AS(run_sweep(other, dir.path()), std::invalid_argument);
}

TEST_CASE("trend frequencies sum to the replicate count") {
  test_util::TempDir dir("sweep_freq");
  const auto outcome = run_sweep(tiny_spec(), dir.path());
  const auto cells = trend_frequencies(outcome.results);
  CHECK(cells.size() == 4);
  for (const auto& c : cells) {
    CHECK(c.counts[0] + c.counts[1] + c.counts[2] + c.counts[3] == 2);
  }
}
