#include "core/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace groomsim {

GradientCell agos_cell(double s, double q, const Environment& env, std::uint32_t replicates,
                       Rng& rng, const AgosSampling& sampling) {
  env.validate();
  if (replicates < 1) throw std::invalid_argument("agos_cell: replicates must be >= 1");

  GradientCell cell;
  cell.s_center = s;
  cell.q_center = q;
  cell.replicates = replicates;
  Population pop(env.n_groomers);
  std::vector<double> before_s(env.n_groomers), before_q(env.n_groomers);
  std::vector<double> after_s(env.n_groomers), after_q(env.n_groomers);
  double sum_ds = 0.0;
  double sum_dq = 0.0;
  for (std::uint32_t r = 0; r < replicates; ++r) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
      pop[i].s = rng.normal(s, sampling.sigma_s);
      pop[i].q = std::clamp(rng.normal(q, sampling.sigma_q), 0.0, 1.0);
      before_s[i] = pop[i].s;
      before_q[i] = pop[i].q;
    }
    const GenerationOutcome gen = run_generation(pop, env, rng, false);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      after_s[i] = gen.next[i].s;
      after_q[i] = gen.next[i].q;
    }
    sum_ds += mean(after_s) - mean(before_s);
    sum_dq += mean(after_q) - mean(before_q);
  }
  cell.ds = sum_ds / replicates;
  cell.dq = sum_dq / replicates;
  return cell;
}

std::vector<double> LatticeRange::points() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("lattice step must be positive");
  }
  if (!(high >= low)) throw std::invalid_argument("lattice high must be >= low");
  const auto count = static_cast<std::size_t>(std::floor((high - low) / step * (1.0 + 1e-9) + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = low + static_cast<double>(i) * step;
  return out;
}

std::vector<GradientCell> agos_grid(const LatticeRange& s_range, const LatticeRange& q_range,
                                    const Environment& env, std::uint32_t replicates, Rng& rng,
                                    unsigned parallelism, const AgosSampling& sampling) {
  env.validate();
  const std::vector<double> s_points = s_range.points();
  const std::vector<double> q_points = q_range.points();
  const std::uint64_t base = rng.next_u64();
  std::vector<GradientCell> cells(s_points.size() * q_points.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < cells.size(); k = next.fetch_add(1)) {
      Rng cell_rng(splitmix64(base ^ splitmix64(k)));
      cells[k] = agos_cell(s_points[k / q_points.size()], q_points[k % q_points.size()], env,
                           replicates, cell_rng, sampling);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(parallelism, cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return cells;
}

std::vector<OrbitPoint> integrate_orbit(OrbitPoint start, std::uint32_t steps, double noise_sigma,
                                        Rng& rng, const GradientFn& gradient) {
  if (noise_sigma < 0.0) throw std::invalid_argument("orbit noise sigma must be >= 0");
  std::vector<OrbitPoint> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(start);
  OrbitPoint state = start;
  for (std::uint32_t t = 0; t < steps; ++t) {
    const auto [ds, dq] = gradient(state.s, state.q, rng);
    state.s += ds + rng.normal(0.0, noise_sigma);
    state.q = std::clamp(state.q + dq + rng.normal(0.0, noise_sigma), 0.0, 1.0);
    path.push_back(state);
  }
  return path;
}

std::vector<OrbitPoint> integrate_orbit(OrbitPoint start, const Environment& env,
                                        std::uint32_t steps, double noise_sigma,
                                        std::uint32_t replicates_per_step, Rng& rng) {
  return integrate_orbit(start, steps, noise_sigma, rng, [&](double s, double q, Rng& r) {
    const GradientCell cell = agos_cell(s, q, env, replicates_per_step, r);
    return std::pair{cell.ds, cell.dq};
  });
}

GradientField::GradientField(const LatticeRange& s_range, const LatticeRange& q_range,
                             std::vector<GradientCell> cells)
    : s_points_(s_range.points()), q_points_(q_range.points()), cells_(std::move(cells)) {
  if (cells_.size() != s_points_.size() * q_points_.size()) {
    throw std::invalid_argument("gradient field size does not match its lattice");
  }
}

std::pair<double, double> GradientField::at(double s, double q) const {
  // Index of the lower lattice point and the fractional offset from it.
  auto locate = [](const std::vector<double>& axis, double x) {
    if (axis.size() == 1 || x <= axis.front()) return std::pair<std::size_t, double>{0, 0.0};
    if (x >= axis.back()) return std::pair<std::size_t, double>{axis.size() - 1, 0.0};
    const auto hi = static_cast<std::size_t>(std::upper_bound(axis.begin(), axis.end(), x) - axis.begin());
    const std::size_t lo = hi - 1;
    return std::pair<std::size_t, double>{lo, (x - axis[lo]) / (axis[hi] - axis[lo])};
  };
  const auto [si, sf] = locate(s_points_, s);
  const auto [qi, qf] = locate(q_points_, q);
  const std::size_t nq = q_points_.size();
  auto cell = [&](std::size_t a, std::size_t b) -> const GradientCell& {
    return cells_[std::min(a, s_points_.size() - 1) * nq + std::min(b, nq - 1)];
  };
  double ds = 0.0;
  double dq = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double weight = (a ? sf : 1.0 - sf) * (b ? qf : 1.0 - qf);
      if (weight == 0.0) continue;
      const GradientCell& c = cell(si + a, qi + b);
      ds += weight * c.ds;
      dq += weight * c.dq;
    }
  }
  return {ds, dq};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit fit;
  const std::size_t n = std::min(x.size(), y.size());
  if (n == 0) return fit;
  const double mx = std::accumulate(x.begin(), x.begin() + n, 0.0) / n;
  const double my = std::accumulate(y.begin(), y.begin() + n, 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  fit.intercept = my;
  if (n < 2 || sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0.0 ? 0.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  return fit;
}

StrengthDistribution strength_distribution(std::span<const std::uint32_t> w_values) {
  StrengthDistribution dist;
  std::vector<std::uint32_t> positive;
  for (const auto w : w_values) {
    if (w == 0) continue;
    positive.push_back(w);
    ++dist.histogram[w];
  }
  if (positive.empty()) throw DomainError("strength_distribution: no positive entries");

  const auto total = static_cast<double>(positive.size());
  std::uint64_t at_or_above = positive.size();
  std::vector<double> log_w;
  std::vector<double> log_ccdf;
  for (const auto& [w, count] : dist.histogram) {
    const double fraction = static_cast<double>(at_or_above) / total;
    dist.ccdf.emplace_back(w, fraction);
    log_w.push_back(std::log(static_cast<double>(w)));
    log_ccdf.push_back(std::log(fraction));
    at_or_above -= count;
  }
  const LineFit fit = fit_line(log_w, log_ccdf);
  dist.powerlaw_slope = fit.slope;
  dist.powerlaw_r2 = fit.r2;
  dist.max_w = dist.histogram.rbegin()->first;

  std::sort(positive.begin(), positive.end());
  const std::size_t n = positive.size();
  dist.median_w = n % 2 == 1 ? positive[n / 2] : 0.5 * (positive[n / 2 - 1] + static_cast<double>(positive[n / 2]));
  return dist;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw DomainError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double rank = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<ProfileRow> strategy_profile(std::span<const ExposureRecord> log,
                                         std::uint64_t min_exposures) {
  if (log.empty()) throw DomainError("strategy_profile: empty event log");
  struct Pool {
    std::uint64_t exposures = 0;
    std::vector<double> per_groomer;
  };
  std::map<std::uint32_t, Pool> by_w;
  for (const auto& e : log) {
    if (e.exposures == 0) continue;
    auto& pool = by_w[e.w];
    pool.exposures += e.exposures;
    pool.per_groomer.push_back(static_cast<double>(e.chosen) / static_cast<double>(e.exposures));
  }
  std::vector<ProfileRow> rows;
  for (const auto& [w, pool] : by_w) {
    if (pool.exposures <= min_exposures) continue;
    rows.push_back({w, percentile(pool.per_groomer, 25.0), percentile(pool.per_groomer, 50.0),
                    percentile(pool.per_groomer, 75.0), pool.exposures});
  }
  return rows;
}

std::vector<TransitionRow> transition_curve(std::span<const SweepCellResult> results,
                                            std::uint32_t r_g) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<double>> groups;
  for (const auto& r : results) {
    if (r.r_g != r_g) continue;
    if (r.trend != TrendLabel::Trend2 && r.trend != TrendLabel::Trend3) continue;
    groups[{r.r_c, r.m}].push_back(r.final_median_q);
  }
  std::vector<TransitionRow> rows;
  for (const auto& [key, qs] : groups) {
    rows.push_back({std::log(static_cast<double>(key.first) / static_cast<double>(key.second)),
                    key.first, key.second, median(qs), static_cast<std::uint32_t>(qs.size())});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.log_rc_over_m < b.log_rc_over_m;
  });
  return rows;
}

double largest_adjacent_jump(std::span<const TransitionRow> rows) {
  double jump = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    jump = std::max(jump, std::abs(rows[i].median_q - rows[i - 1].median_q));
  }
  return jump;
}

TrendLabel TrendFrequency::majority() const {
  const auto it = std::max_element(counts.begin(), counts.end());
  return static_cast<TrendLabel>(it - counts.begin() + 1);
}

std::vector<TrendFrequency> trend_frequencies(std::span<const SweepCellResult> results) {
  std::map<std::array<std::uint32_t, 3>, TrendFrequency> cells;
  for (const auto& r : results) {
    auto& f = cells[{r.r_g, r.r_c, r.m}];
    f.r_g = r.r_g;
    f.r_c = r.r_c;
    f.m = r.m;
    ++f.counts[static_cast<std::size_t>(r.trend) - 1];
  }
  std::vector<TrendFrequency> out;
  for (const auto& [key, f] : cells) out.push_back(f);
  return out;
}

}  // namespace groomsim
