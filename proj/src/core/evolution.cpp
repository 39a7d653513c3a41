#include "core/evolution.hpp"

#include <algorithm>
#include <numeric>

namespace groomsim {

Population init_population(const Environment& env, Rng& rng) {
  Population pop(env.n_groomers);
  for (auto& member : pop) {
    member.s = rng.normal(0.0, kInitialShapeSigma);
    member.q = rng.uniform01();
  }
  return pop;
}

std::vector<std::size_t> roulette_select(std::span<const std::uint32_t> fitness,
                                         std::size_t n_offspring, Rng& rng) {
  std::vector<std::size_t> parents(n_offspring);
  std::vector<std::uint64_t> cumulative(fitness.size());
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    total += fitness[i];
    cumulative[i] = total;
  }
  for (auto& parent : parents) {
    if (total == 0) {
      parent = rng.uniform_index(fitness.size());
      continue;
    }
    const double u = rng.uniform01() * static_cast<double>(total);
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u,
                               [](double x, std::uint64_t c) { return x < static_cast<double>(c); });
    if (it == cumulative.end()) --it;
    parent = static_cast<std::size_t>(it - cumulative.begin());
  }
  return parents;
}

Strategy apply_mutation(const Strategy& parent, double s_noise, double q_noise) {
  return {parent.s + s_noise, std::clamp(parent.q + q_noise, 0.0, 1.0)};
}

Strategy mutate(const Strategy& parent, Rng& rng) {
  const double ds = rng.normal(0.0, kShapeMutationSigma);
  const double dq = rng.normal(0.0, kRateMutationSigma);
  return apply_mutation(parent, ds, dq);
}

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
  if (values.empty()) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = mean(values);
  double acc = 0.0;
  for (const double v : values) acc += (v - m) * (v - m);
  return acc / static_cast<double>(values.size());
}

GenerationRecord summarize(std::uint32_t generation, const Population& pop,
                           std::span<const std::uint32_t> fitness) {
  std::vector<double> s(pop.size());
  std::vector<double> q(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) {
    s[i] = pop[i].s;
    q[i] = pop[i].q;
  }
  GenerationRecord r;
  r.generation = generation;
  r.mean_s = mean(s);
  r.median_s = median(s);
  r.var_s = variance(s);
  r.mean_q = mean(q);
  r.median_q = median(q);
  r.var_q = variance(q);
  r.total_fitness = std::accumulate(fitness.begin(), fitness.end(), std::uint64_t{0});
  r.max_fitness = fitness.empty() ? 0 : *std::max_element(fitness.begin(), fitness.end());
  return r;
}

GenerationOutcome run_generation(const Population& pop, const Environment& env, Rng& rng,
                                 bool mutate_offspring, std::vector<ExposureRow>* tallies) {
  GenerationOutcome out;
  out.w = RelationshipMatrix(pop.size(), env.n_groomees);
  if (tallies != nullptr) tallies->assign(pop.size(), ExposureRow{});

  GroomingWorkspace workspace;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    workspace.groom(pop[i], out.w.row(i), env.r_g, env.kernel_scope, rng,
                    tallies != nullptr ? &(*tallies)[i] : nullptr);
  }
  out.fitness = cooperation_stage(out.w, env, rng);
  out.record = summarize(0, pop, out.fitness);

  const auto parents = roulette_select(out.fitness, pop.size(), rng);
  out.next.reserve(pop.size());
  for (const std::size_t p : parents) out.next.push_back(pop[p]);
  if (mutate_offspring) {
    for (auto& child : out.next) child = mutate(child, rng);
  }
  return out;
}

std::vector<ExposureRecord> flatten_tallies(const std::vector<ExposureRow>& tallies) {
  std::vector<ExposureRecord> out;
  for (std::size_t i = 0; i < tallies.size(); ++i) {
    for (std::size_t w = 0; w < tallies[i].size(); ++w) {
      const auto& t = tallies[i][w];
      if (t.exposures == 0) continue;
      out.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(w), t.exposures,
                     t.chosen});
    }
  }
  return out;
}

SimulationResult run_simulation(const Environment& env, std::uint64_t seed,
                                bool capture_event_log) {
  env.validate();
  SimulationResult result;
  result.env = env;
  result.seed = seed;
  result.records.reserve(env.t_generations);

  Rng rng(seed);
  Population pop = init_population(env, rng);
  std::vector<ExposureRow> tallies;
  for (std::uint32_t t = 0; t < env.t_generations; ++t) {
    const bool last = t + 1 == env.t_generations;
    GenerationOutcome gen =
        run_generation(pop, env, rng, true, last && capture_event_log ? &tallies : nullptr);
    gen.record.generation = t;
    result.records.push_back(gen.record);
    pop = std::move(gen.next);
    if (last) result.final_w = std::move(gen.w);
  }
  result.final_population = std::move(pop);
  if (capture_event_log) result.grooming_event_log = flatten_tallies(tallies);
  return result;
}

}  // namespace groomsim
