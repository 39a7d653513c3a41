#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace groomsim {

// Reference evolutionary constants.
inline constexpr double kInitialShapeSigma = 5.0;
inline constexpr double kShapeMutationSigma = 0.2;
inline constexpr double kRateMutationSigma = 0.05;

// Summary of one generation, computed from the population that played it
// (before selection) and the fitness it earned.
struct GenerationRecord {
  std::uint32_t generation = 0;
  double mean_s = 0.0;
  double median_s = 0.0;
  double var_s = 0.0;
  double mean_q = 0.0;
  double median_q = 0.0;
  double var_q = 0.0;
  std::uint64_t total_fitness = 0;
  std::uint32_t max_fitness = 0;

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

// Aggregated partner-selection tallies of one groomer at one strength.
struct ExposureRecord {
  std::uint32_t groomer = 0;
  std::uint32_t w = 0;
  std::uint64_t exposures = 0;
  std::uint64_t chosen = 0;

  friend bool operator==(const ExposureRecord&, const ExposureRecord&) = default;
};

struct SimulationResult {
  Environment env;
  std::uint64_t seed = 0;
  std::vector<GenerationRecord> records;
  // Offspring produced by the last generation (the evolved population).
  Population final_population;
  // Relationships built during the last generation.
  RelationshipMatrix final_w;
  // Partner-selection tallies of the last generation, when captured.
  std::optional<std::vector<ExposureRecord>> grooming_event_log;

  friend bool operator==(const SimulationResult&, const SimulationResult&) = default;
};

struct GenerationOutcome {
  Population next;
  GenerationRecord record;
  RelationshipMatrix w;
  FitnessVector fitness;
};

// s ~ Gaussian(0, 5), q ~ Uniform[0, 1), drawn member by member (s then q).
Population init_population(const Environment& env, Rng& rng);

// Parent index of each of n_offspring offspring, drawn independently with
// probability fitness[i] / sum(fitness); uniform when the sum is zero.
std::vector<std::size_t> roulette_select(std::span<const std::uint32_t> fitness,
                                         std::size_t n_offspring, Rng& rng);

// Adds the given noise to s and to q, clamping q to [0, 1].
Strategy apply_mutation(const Strategy& parent, double s_noise, double q_noise);

// apply_mutation with s noise ~ Gaussian(0, 0.2) then q noise ~ Gaussian(0, 0.05).
Strategy mutate(const Strategy& parent, Rng& rng);

double mean(std::span<const double> values);
double median(std::span<const double> values);
// Population variance (divides by n).
double variance(std::span<const double> values);

GenerationRecord summarize(std::uint32_t generation, const Population& pop,
                           std::span<const std::uint32_t> fitness);

// One generation: fresh relationships, grooming for groomers 0..N-1,
// cooperation for groomees 0..M-1, roulette selection of N offspring in
// order, then (if mutate_offspring) mutation of each offspring in order.
// When tallies is non-null it receives one ExposureRow per groomer.
GenerationOutcome run_generation(const Population& pop, const Environment& env, Rng& rng,
                                 bool mutate_offspring,
                                 std::vector<ExposureRow>* tallies = nullptr);

// Deterministic in (env, seed): the stream is Rng(seed), consumed by
// init_population and then T generations with mutation.
// Throws std::invalid_argument for an invalid environment.
SimulationResult run_simulation(const Environment& env, std::uint64_t seed,
                                bool capture_event_log = false);

std::vector<ExposureRecord> flatten_tallies(const std::vector<ExposureRow>& tallies);

}  // namespace groomsim
