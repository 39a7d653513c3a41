#pragma once

#include <span>
#include <string>

#include "core/analysis.hpp"
#include "core/serialize.hpp"

// Plot-ready text renderings of analysis results. Every CSV starts with a
// "# {metadata}" line followed by its column header.
namespace groomsim::report {

// s,q,ds,dq,replicates
std::string gradient_csv(std::span<const GradientCell> cells, const Json& metadata);
// step,s,q
std::string orbit_csv(std::span<const OrbitPoint> path, const Json& metadata);
// w,count
std::string histogram_csv(const StrengthDistribution& dist, const Json& metadata);
// w,ccdf
std::string ccdf_csv(const StrengthDistribution& dist, const Json& metadata);
// {"_meta", "n_relationships", "distinct_w", "max_w", "median_w", "powerlaw_slope", "powerlaw_r2"}
std::string fit_json(const StrengthDistribution& dist, const Json& metadata);
// w,p25,p50,p75,n_exposures
std::string profile_csv(std::span<const ProfileRow> rows, const Json& metadata);
// log_rc_over_m,r_c,m,median_q,n_replicates
std::string transition_csv(std::span<const TransitionRow> rows, const Json& metadata);
// r_g,r_c,m,trend1,trend2,trend3,trend4,majority
std::string trend_frequency_csv(std::span<const TrendFrequency> cells, const Json& metadata);
// median_s,median_q,trend
std::string trend_csv(double median_s, double median_q, TrendLabel trend, const Json& metadata);

}  // namespace groomsim::report
