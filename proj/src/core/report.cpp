#include "core/report.hpp"

namespace groomsim::report {

namespace {

std::string head(const Json& metadata, std::string_view columns) {
  std::string out = csv_metadata_line(metadata);
  out += columns;
  out += '\n';
  return out;
}

}  // namespace

std::string gradient_csv(std::span<const GradientCell> cells, const Json& metadata) {
  std::string out = head(metadata, "s,q,ds,dq,replicates");
  for (const auto& c : cells) {
    out += format_double(c.s_center) + ',' + format_double(c.q_center) + ',' + format_double(c.ds) +
           ',' + format_double(c.dq) + ',' + std::to_string(c.replicates) + '\n';
  }
  return out;
}

std::string orbit_csv(std::span<const OrbitPoint> path, const Json& metadata) {
  std::string out = head(metadata, "step,s,q");
  for (std::size_t t = 0; t < path.size(); ++t) {
    out += std::to_string(t) + ',' + format_double(path[t].s) + ',' + format_double(path[t].q) + '\n';
  }
  return out;
}

std::string histogram_csv(const StrengthDistribution& dist, const Json& metadata) {
  std::string out = head(metadata, "w,count");
  for (const auto& [w, count] : dist.histogram) {
    out += std::to_string(w) + ',' + std::to_string(count) + '\n';
  }
  return out;
}

std::string ccdf_csv(const StrengthDistribution& dist, const Json& metadata) {
  std::string out = head(metadata, "w,ccdf");
  for (const auto& [w, fraction] : dist.ccdf) {
    out += std::to_string(w) + ',' + format_double(fraction) + '\n';
  }
  return out;
}

std::string fit_json(const StrengthDistribution& dist, const Json& metadata) {
  std::uint64_t n = 0;
  for (const auto& [w, count] : dist.histogram) n += count;
  const Json j{{std::string(kMetaKey), metadata},
               {"n_relationships", n},
               {"distinct_w", dist.histogram.size()},
               {"max_w", dist.max_w},
               {"median_w", dist.median_w},
               {"powerlaw_slope", dist.powerlaw_slope},
               {"powerlaw_r2", dist.powerlaw_r2}};
  return j.dump(2) + '\n';
}

std::string profile_csv(std::span<const ProfileRow> rows, const Json& metadata) {
  std::string out = head(metadata, "w,p25,p50,p75,n_exposures");
  for (const auto& r : rows) {
    out += std::to_string(r.w) + ',' + format_double(r.p25) + ',' + format_double(r.p50) + ',' +
           format_double(r.p75) + ',' + std::to_string(r.n_exposures) + '\n';
  }
  return out;
}

std::string transition_csv(std::span<const TransitionRow> rows, const Json& metadata) {
  std::string out = head(metadata, "log_rc_over_m,r_c,m,median_q,n_replicates");
  for (const auto& r : rows) {
    out += format_double(r.log_rc_over_m) + ',' + std::to_string(r.r_c) + ',' +
           std::to_string(r.m) + ',' + format_double(r.median_q) + ',' +
           std::to_string(r.n_replicates) + '\n';
  }
  return out;
}

std::string trend_frequency_csv(std::span<const TrendFrequency> cells, const Json& metadata) {
  std::string out = head(metadata, "r_g,r_c,m,trend1,trend2,trend3,trend4,majority");
  for (const auto& c : cells) {
    out += std::to_string(c.r_g) + ',' + std::to_string(c.r_c) + ',' + std::to_string(c.m);
    for (const auto count : c.counts) out += ',' + std::to_string(count);
    out += ',' + std::string(to_string(c.majority())) + '\n';
  }
  return out;
}

std::string trend_csv(double median_s, double median_q, TrendLabel trend, const Json& metadata) {
  return head(metadata, "median_s,median_q,trend") + format_double(median_s) + ',' +
         format_double(median_q) + ',' + std::string(to_string(trend)) + '\n';
}

}  // namespace groomsim::report
