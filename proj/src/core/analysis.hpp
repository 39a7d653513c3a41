#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "core/evolution.hpp"
#include "core/rng.hpp"
#include "core/sweep.hpp"
#include "core/trend.hpp"
#include "core/types.hpp"

namespace groomsim {

// ---------------------------------------------------------------------------
// Average gradient of selection

// Mean one-generation displacement of the population means of s and q for
// populations sampled around (s_center, q_center).
struct GradientCell {
  double s_center = 0.0;
  double q_center = 0.0;
  double ds = 0.0;
  double dq = 0.0;
  std::uint32_t replicates = 0;
};

// Spread of the sampled populations. Zero sigmas give clone populations.
struct AgosSampling {
  double sigma_s = 0.2;
  double sigma_q = 0.2;
};

inline constexpr std::uint32_t kDefaultAgosReplicates = 30;

// For each replicate: N strategies with s ~ Gaussian(s, sigma_s) and
// q ~ Gaussian(q, sigma_q) clamped to [0, 1] (member by member, s then q),
// one generation of grooming, cooperation and roulette selection without
// mutation, then the change of mean s and mean q. Returns the averages.
GradientCell agos_cell(double s, double q, const Environment& env, std::uint32_t replicates,
                       Rng& rng, const AgosSampling& sampling = {});

// Lattice low, low + step, ... up to high (inclusive, with 1e-9 relative slack).
struct LatticeRange {
  double low = 0.0;
  double high = 0.0;
  double step = 1.0;

  // Throws std::invalid_argument unless step > 0 and high >= low.
  std::vector<double> points() const;
};

// One GradientCell per lattice point, s-major then q. Each cell gets its own
// stream seeded from one draw of rng mixed with the cell index, so the output
// is the same for any parallelism.
std::vector<GradientCell> agos_grid(const LatticeRange& s_range, const LatticeRange& q_range,
                                    const Environment& env, std::uint32_t replicates, Rng& rng,
                                    unsigned parallelism = 1, const AgosSampling& sampling = {});

struct OrbitPoint {
  double s = 0.0;
  double q = 0.0;

  friend bool operator==(const OrbitPoint&, const OrbitPoint&) = default;
};

// Gradient (ds, dq) at a point; may draw from the stream.
using GradientFn = std::function<std::pair<double, double>(double s, double q, Rng& rng)>;

// state <- state + gradient(state) + Gaussian(0, noise_sigma) per component,
// q clamped to [0, 1]. Returns steps + 1 points, the start included.
std::vector<OrbitPoint> integrate_orbit(OrbitPoint start, std::uint32_t steps, double noise_sigma,
                                        Rng& rng, const GradientFn& gradient);

// Orbit with the gradient evaluated by agos_cell at the current point.
std::vector<OrbitPoint> integrate_orbit(OrbitPoint start, const Environment& env,
                                        std::uint32_t steps, double noise_sigma,
                                        std::uint32_t replicates_per_step, Rng& rng);

// Bilinear interpolation over a precomputed agos_grid result; a cheaper
// gradient for integrate_orbit. Points outside the lattice are clamped to it.
class GradientField {
 public:
  GradientField(const LatticeRange& s_range, const LatticeRange& q_range,
                std::vector<GradientCell> cells);
  std::pair<double, double> at(double s, double q) const;

 private:
  std::vector<double> s_points_;
  std::vector<double> q_points_;
  std::vector<GradientCell> cells_;
};

// ---------------------------------------------------------------------------
// Relationship-strength distribution

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares. Fewer than two distinct x values give the
// degenerate fit {0, mean(y), 0}.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

struct StrengthDistribution {
  std::map<std::uint32_t, std::uint64_t> histogram;
  // (w, fraction of positive entries >= w), ascending in w.
  std::vector<std::pair<std::uint32_t, double>> ccdf;
  double powerlaw_slope = 0.0;
  double powerlaw_r2 = 0.0;
  std::uint32_t max_w = 0;
  double median_w = 0.0;
};

// Pools the positive entries, builds histogram and CCDF, and fits
// log(ccdf) against log(w) over the distinct values.
// Throws DomainError if no entry is positive.
StrengthDistribution strength_distribution(std::span<const std::uint32_t> w_values);
inline StrengthDistribution strength_distribution(const RelationshipMatrix& w) {
  return strength_distribution(w.values());
}

// ---------------------------------------------------------------------------
// Strategy profile

struct ProfileRow {
  std::uint32_t w = 0;
  double p25 = 0.0;
  double p50 = 0.0;
  double p75 = 0.0;
  std::uint64_t n_exposures = 0;
};

// Strength values seen at most this many times are dropped from a profile.
inline constexpr std::uint64_t kProfileMinExposures = 20;

// Linear-interpolation percentile (pct in [0, 100]) of a non-empty sample.
double percentile(std::vector<double> values, double pct);

// Per groomer p(w) = chosen / exposures; rows report the 25th/50th/75th
// percentiles across groomers exposed at w. Rows whose pooled exposure count
// is <= min_exposures are dropped. Throws DomainError on an empty log.
std::vector<ProfileRow> strategy_profile(std::span<const ExposureRecord> log,
                                         std::uint64_t min_exposures = kProfileMinExposures);

// ---------------------------------------------------------------------------
// Sweep aggregation

struct TransitionRow {
  double log_rc_over_m = 0.0;
  std::uint32_t r_c = 0;
  std::uint32_t m = 0;
  double median_q = 0.0;
  std::uint32_t n_replicates = 0;
};

// Trend2/Trend3 results at r_g, grouped by (r_c, m), each group reduced to
// the median of final_median_q, sorted by ln(r_c / m).
std::vector<TransitionRow> transition_curve(std::span<const SweepCellResult> results,
                                            std::uint32_t r_g);

// Largest |median_q| difference between adjacent rows; 0 for fewer than two.
double largest_adjacent_jump(std::span<const TransitionRow> rows);

struct TrendFrequency {
  std::uint32_t r_g = 0;
  std::uint32_t r_c = 0;
  std::uint32_t m = 0;
  std::array<std::uint32_t, 4> counts{};

  TrendLabel majority() const;
};

// Trend counts per (r_g, r_c, m), sorted by that key.
std::vector<TrendFrequency> trend_frequencies(std::span<const SweepCellResult> results);

}  // namespace groomsim
