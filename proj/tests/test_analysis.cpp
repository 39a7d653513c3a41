#include <doctest.h>

#include <cmath>
#include <limits>

#include "core/analysis.hpp"
#include "core/model.hpp"
#include "core/report.hpp"
#include "oracles.hpp"

using namespace groomsim;

namespace {

Environment env_of(std::uint32_t r_c, std::uint32_t m, std::uint32_t r_g = 300, std::uint32_t n = 100) {
  Environment env;
  env.n_groomers = n;
  env.n_groomees = m;
  env.r_c = r_c;
  env.r_g = r_g;
  return env;
}

SweepCellResult cell(std::uint32_t r_c, std::uint32_t m, double q, TrendLabel trend,
                     std::uint32_t replicate = 0, std::uint32_t r_g = 300) {
  SweepCellResult r;
  r.r_c = r_c;
  r.m = m;
  r.r_g = r_g;
  r.replicate = replicate;
  r.final_median_s = 1.0;
  r.final_median_q = q;
  r.trend = trend;
  return r;
}

}  // namespace

TEST_CASE("classify_trend examples") {
  CHECK(classify_trend(3.5, 0.1) == TrendLabel::Trend1);
  CHECK(classify_trend(1.0, 0.8) == TrendLabel::Trend2);
  CHECK(classify_trend(0.8, 0.1) == TrendLabel::Trend3);
  CHECK(classify_trend(-2.0, 0.6) == TrendLabel::Trend4);
  CHECK(classify_trend(2.0, 0.9) == TrendLabel::Trend1);
  CHECK(classify_trend(0.0, 0.5) == TrendLabel::Trend2);
  CHECK_THROWS_AS(classify_trend(std::nan(""), 0.5), DomainError);
  CHECK_THROWS_AS(classify_trend(1.0, std::nan("")), DomainError);
  const TrendThresholds custom{5.0, -1.0, 0.3};
  CHECK(classify_trend(3.0, 0.4, custom) == TrendLabel::Trend2);
  CHECK(classify_trend(-0.5, 0.1, custom) == TrendLabel::Trend3);
}

TEST_CASE("trend regions partition the plane") {
  Rng rng(4);
  for (int k = 0; k < 20000; ++k) {
    const double s = rng.uniform01() * 20.0 - 10.0;
    const double q = rng.uniform01();
    const TrendLabel t = classify_trend(s, q);
    const bool in1 = s >= 2.0;
    const bool in2 = s >= 0.0 && s < 2.0 && q >= 0.5;
    const bool in3 = s >= 0.0 && s < 2.0 && q < 0.5;
    const bool in4 = s < 0.0;
    CHECK(in1 + in2 + in3 + in4 == 1);
    CHECK(t == (in1 ? TrendLabel::Trend1 : in2 ? TrendLabel::Trend2 : in3 ? TrendLabel::Trend3 : TrendLabel::Trend4));
    CHECK(classify_trend(s, q) == t);
  }
  for (const auto label : {TrendLabel::Trend1, TrendLabel::Trend2, TrendLabel::Trend3, TrendLabel::Trend4}) {
    CHECK(trend_from_string(to_string(label)) == label);
  }
  CHECK_THROWS_AS(trend_from_string("Trend5"), std::invalid_argument);
}

TEST_CASE("clone populations have zero gradient") {
  Rng rng(10);
  for (const auto& [s, q] : {std::pair{0.0, 0.5}, std::pair{3.0, 0.1}, std::pair{-2.0, 1.0}}) {
    const auto c = agos_cell(s, q, env_of(5, 20, 50, 40), 5, rng, {0.0, 0.0});
    CHECK(c.ds == 0.0);
    CHECK(c.dq == 0.0);
    CHECK(c.replicates == 5);
  }
}

TEST_CASE("agos replicate mean equals the mean of single replicates") {
  const Environment env = env_of(5, 10, 40, 30);
  Rng a(77);
  const auto whole = agos_cell(0.0, 0.5, env, 30, a);
  Rng b(77);
  double ds = 0.0;
  double dq = 0.0;
  for (int r = 0; r < 30; ++r) {
    const auto one = agos_cell(0.0, 0.5, env, 1, b);
    ds += one.ds;
    dq += one.dq;
  }
  CHECK(whole.ds == doctest::Approx(ds / 30).epsilon(1e-12));
  CHECK(whole.dq == doctest::Approx(dq / 30).epsilon(1e-12));
}

TEST_CASE("lattice construction") {
  const LatticeRange s{-1.0, 1.0, 1.0};
  const LatticeRange q{0.0, 1.0, 0.5};
  CHECK(s.points() == std::vector<double>{-1.0, 0.0, 1.0});
  CHECK(q.points() == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(LatticeRange{-4.0, 4.0, 0.5}.points().size() == 17);
  CHECK(LatticeRange{0.0, 1.0, 0.05}.points().size() == 21);
  CHECK_THROWS_AS((LatticeRange{0.0, 1.0, 0.0}.points()), std::invalid_argument);
  CHECK_THROWS_AS((LatticeRange{1.0, 0.0, 0.1}.points()), std::invalid_argument);

  Rng rng(1);
  const auto cells = agos_grid(s, q, env_of(2, 4, 10, 20), 2, rng);
  REQUIRE(cells.size() == 9);
  std::size_t k = 0;
  for (const double sv : s.points()) {
    for (const double qv : q.points()) {
      CHECK(cells[k].s_center == sv);
      CHECK(cells[k].q_center == qv);
      ++k;
    }
  }
}

TEST_CASE("agos grid does not depend on parallelism") {
  const LatticeRange s{-1.0, 1.0, 0.5};
  const LatticeRange q{0.0, 1.0, 0.25};
  Rng a(8);
  Rng b(8);
  const auto one = agos_grid(s, q, env_of(3, 6, 20, 20), 3, a, 1);
  const auto many = agos_grid(s, q, env_of(3, 6, 20, 20), 3, b, 4);
  REQUIRE(one.size() == many.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].ds == many[k].ds);
    CHECK(one[k].dq == many[k].dq);
  }
}

TEST_CASE("orbit construction") {
  Rng rng(3);
  const auto zero = [](double, double, Rng&) { return std::pair{0.0, 0.0}; };
  const auto still = integrate_orbit({0.4, 0.6}, 25, 0.0, rng, zero);
  REQUIRE(still.size() == 26);
  for (const auto& p : still) CHECK(p == OrbitPoint{0.4, 0.6});

  const auto up = [](double, double, Rng&) { return std::pair{0.1, 0.3}; };
  const auto path = integrate_orbit({0.0, 0.5}, 10, 0.0, rng, up);
  CHECK(path.back().s == doctest::Approx(1.0));
  CHECK(path.back().q == 1.0);
  CHECK_THROWS_AS(integrate_orbit({0.0, 0.5}, 3, -1.0, rng, zero), std::invalid_argument);

  const auto real = integrate_orbit({0.0, 0.5}, env_of(2, 4, 10, 20), 5, 0.01, 2, rng);
  CHECK(real.size() == 6);
}

TEST_CASE("gradient field interpolation") {
  const LatticeRange s{0.0, 1.0, 1.0};
  const LatticeRange q{0.0, 1.0, 1.0};
  std::vector<GradientCell> cells{{0, 0, 0.0, 1.0, 1}, {0, 1, 1.0, 1.0, 1}, {1, 0, 2.0, 1.0, 1}, {1, 1, 3.0, 1.0, 1}};
  const GradientField field(s, q, cells);
  CHECK(field.at(0.0, 0.0).first == 0.0);
  CHECK(field.at(0.5, 0.5).first == doctest::Approx(1.5));
  CHECK(field.at(1.0, 0.25).first == doctest::Approx(2.25));
  CHECK(field.at(9.0, 9.0).first == doctest::Approx(3.0));
  CHECK(field.at(0.3, 0.3).second == doctest::Approx(1.0));
}

TEST_CASE("strength distribution examples") {
  const std::vector<std::uint32_t> row{5, 3, 1, 1};
  const auto d = strength_distribution(row);
  REQUIRE(d.ccdf.size() == 3);
  CHECK(d.ccdf[0] == std::pair<std::uint32_t, double>{1, 1.0});
  CHECK(d.ccdf[1] == std::pair<std::uint32_t, double>{3, 0.5});
  CHECK(d.ccdf[2] == std::pair<std::uint32_t, double>{5, 0.25});
  CHECK(d.histogram.at(1) == 2);
  CHECK(d.max_w == 5);
  CHECK(d.median_w == 2.0);

  const std::vector<std::uint32_t> flat{4, 4, 4, 0};
  const auto f = strength_distribution(flat);
  CHECK(f.ccdf.size() == 1);
  CHECK(f.powerlaw_slope == 0.0);
  CHECK(f.powerlaw_r2 == 0.0);

  const std::vector<std::uint32_t> none{0, 0};
  CHECK_THROWS_AS(strength_distribution(none), DomainError);
}

TEST_CASE("fit recovers an exact CCDF exponent") {
  // Values 2^k with CCDF exactly 2^-k: log-log slope -1 with R^2 = 1.
  std::vector<std::uint32_t> w;
  constexpr int levels = 10;
  for (int k = 0; k < levels; ++k) {
    const std::uint32_t count = k + 1 < levels ? 1u << (levels - 2 - k) : 1u;
    for (std::uint32_t c = 0; c < count; ++c) w.push_back(1u << k);
  }
  const auto d = strength_distribution(w);
  CHECK(d.powerlaw_slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(d.powerlaw_r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit on a truncated w^-2 law matches the analytic oracle") {
  // Counts round(1e6 / w^2) on w = 1..100. The CCDF of an untruncated
  // density-exponent-2 law has exponent 1, but the cut at 100 bends the tail,
  // so the least-squares slope over the distinct values is the one computed
  // here in long double directly from the counts.
  std::vector<std::uint32_t> w;
  std::vector<long double> counts;
  for (std::uint32_t v = 1; v <= 100; ++v) {
    const auto c = static_cast<std::uint32_t>(std::llround(1e6L / (static_cast<long double>(v) * v)));
    counts.push_back(c);
    for (std::uint32_t k = 0; k < c; ++k) w.push_back(v);
  }
  long double total = 0;
  for (const auto c : counts) total += c;
  long double tail = total;
  long double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const long double x = std::log(static_cast<long double>(i + 1));
    const long double y = std::log(tail / total);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    tail -= counts[i];
  }
  const long double n = counts.size();
  const long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const long double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));

  const auto d = strength_distribution(w);
  CHECK(d.powerlaw_slope == doctest::Approx(static_cast<double>(slope)).epsilon(1e-9));
  CHECK(d.powerlaw_r2 == doctest::Approx(static_cast<double>(r * r)).epsilon(1e-9));
  CHECK(d.powerlaw_slope == doctest::Approx(-1.75).epsilon(0.01));
}

TEST_CASE("ccdf is monotone and histogram counts positive entries") {
  Rng rng(12);
  for (int k = 0; k < 50; ++k) {
    std::vector<std::uint32_t> w(1 + rng.uniform_index(200));
    std::uint64_t positive = 0;
    for (auto& v : w) {
      v = static_cast<std::uint32_t>(rng.uniform_index(30));
      positive += v > 0 ? 1 : 0;
    }
    if (positive == 0) w[0] = 1, positive = 1;
    const auto d = strength_distribution(w);
    std::uint64_t sum = 0;
    for (const auto& [value, count] : d.histogram) sum += count;
    CHECK(sum == positive);
    CHECK(d.ccdf.front().second == 1.0);
    for (std::size_t i = 1; i < d.ccdf.size(); ++i) CHECK(d.ccdf[i].second <= d.ccdf[i - 1].second);
    CHECK(d.powerlaw_r2 >= 0.0);
    CHECK(d.powerlaw_r2 <= 1.0 + 1e-12);
  }
}

TEST_CASE("strategy profile examples") {
  const std::vector<ExposureRecord> one{{0, 1, 30, 15}, {0, 2, 10, 3}};
  const auto rows = strategy_profile(one);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].w == 1);
  CHECK(rows[0].p25 == 0.5);
  CHECK(rows[0].p50 == 0.5);
  CHECK(rows[0].p75 == 0.5);
  CHECK(rows[0].n_exposures == 30);

  // Exactly 20 exposures is still dropped; 21 is kept.
  const std::vector<ExposureRecord> floor{{0, 1, 20, 1}, {0, 2, 21, 1}};
  const auto kept = strategy_profile(floor);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].w == 2);

  const std::vector<ExposureRecord> spread{{0, 3, 10, 1}, {1, 3, 10, 5}, {2, 3, 10, 9}};
  const auto p = strategy_profile(spread);
  REQUIRE(p.size() == 1);
  CHECK(p[0].p25 == doctest::Approx(0.3));
  CHECK(p[0].p50 == doctest::Approx(0.5));
  CHECK(p[0].p75 == doctest::Approx(0.7));

  CHECK_THROWS_AS(strategy_profile(std::vector<ExposureRecord>{}), DomainError);
  CHECK(percentile({1.0, 2.0, 3.0, 4.0}, 25) == doctest::Approx(1.75));
}

namespace {

// Grooms `groomers` identical rows pre-seeded with `per_level` candidates at
// each strength 1..levels (plus strangers) and returns the profile rows.
std::vector<ExposureRecord> profile_log(double s, std::uint32_t levels, std::uint32_t per_level,
                                        std::uint32_t actions, std::uint32_t groomers, Rng& rng) {
  std::vector<ExposureRow> tallies(groomers);
  GroomingWorkspace workspace;
  for (std::uint32_t g = 0; g < groomers; ++g) {
    std::vector<std::uint32_t> row;
    for (std::uint32_t v = 1; v <= levels; ++v) row.insert(row.end(), per_level, v);
    row.insert(row.end(), per_level, 0u);
    workspace.groom({s, 0.0}, row, actions, KernelScope::AllGroomees, rng, &tallies[g]);
  }
  return flatten_tallies(tallies);
}

}  // namespace

TEST_CASE("s = 1 profiles are proportional to w") {
  Rng rng(2);
  const auto log = profile_log(1.0, 5, 200, 300, 20, rng);
  const auto rows = strategy_profile(log);
  // Pooled constant c with p(w) = c w, from the positive strengths 1..5.
  double chosen = 0.0;
  double weighted = 0.0;
  for (const auto& e : log) {
    if (e.w == 0 || e.w > 5) continue;
    chosen += static_cast<double>(e.chosen);
    weighted += static_cast<double>(e.w) * static_cast<double>(e.exposures);
  }
  const double c = chosen / weighted;
  int checked = 0;
  for (const auto& r : rows) {
    if (r.w == 0) {
      CHECK(r.p50 == 0.0);
      continue;
    }
    if (r.w > 5) continue;
    const double per_groomer = static_cast<double>(r.n_exposures) / 20.0;
    const double sigma = oracle::binomial_sigma(c * r.w, per_groomer);
    CHECK(std::abs(r.p50 - c * r.w) <= 3.0 * sigma);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("s = 0 profiles are flat in w") {
  Rng rng(5);
  const auto log = profile_log(0.0, 2, 300, 300, 20, rng);
  const auto rows = strategy_profile(log);
  double chosen = 0.0;
  double exposures = 0.0;
  for (const auto& e : log) {
    chosen += static_cast<double>(e.chosen);
    exposures += static_cast<double>(e.exposures);
  }
  const double p = chosen / exposures;
  for (const auto& r : rows) {
    const double per_groomer = static_cast<double>(r.n_exposures) / 20.0;
    if (r.w > 2) continue;
    CHECK(std::abs(r.p50 - p) <= 3.0 * oracle::binomial_sigma(p, per_groomer));
  }
}

TEST_CASE("transition curve examples") {
  const std::vector<SweepCellResult> two{cell(5, 200, 0.1, TrendLabel::Trend3),
                                         cell(15, 45, 0.8, TrendLabel::Trend2)};
  const auto rows = transition_curve(two, 300);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].r_c == 5);
  CHECK(rows[0].log_rc_over_m == doctest::Approx(std::log(1.0 / 40)));
  CHECK(rows[1].r_c == 15);
  CHECK(largest_adjacent_jump(rows) == doctest::Approx(0.7));

  const std::vector<SweepCellResult> dup{cell(5, 50, 0.1, TrendLabel::Trend3, 0),
                                         cell(5, 50, 0.3, TrendLabel::Trend2, 1),
                                         cell(5, 50, 0.2, TrendLabel::Trend3, 2),
                                         cell(5, 50, 0.9, TrendLabel::Trend1, 3),
                                         cell(5, 50, 0.9, TrendLabel::Trend3, 0, 100)};
  const auto one = transition_curve(dup, 300);
  REQUIRE(one.size() == 1);
  CHECK(one[0].median_q == doctest::Approx(0.2));
  CHECK(one[0].n_replicates == 3);

  const std::vector<SweepCellResult> none{cell(5, 5, 0.1, TrendLabel::Trend1)};
  CHECK(transition_curve(none, 300).empty());
  CHECK(largest_adjacent_jump(transition_curve(none, 300)) == 0.0);
}

TEST_CASE("transition curve is sorted with one row per cell") {
  Rng rng(9);
  std::vector<SweepCellResult> results;
  for (std::uint32_t r_c = 5; r_c <= 50; r_c += 5) {
    for (std::uint32_t m = 5; m <= 200; m += 15) {
      for (std::uint32_t rep = 0; rep < 3; ++rep) {
        results.push_back(cell(r_c, m, rng.uniform01(), rep % 2 ? TrendLabel::Trend2 : TrendLabel::Trend3, rep));
      }
    }
  }
  const auto rows = transition_curve(results, 300);
  CHECK(rows.size() == 10 * 14);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].log_rc_over_m <= rows[i].log_rc_over_m);
}

TEST_CASE("report renderings carry the metadata line") {
  const Json meta{{"seed", 1}};
  const std::vector<GradientCell> cells{{0.0, 0.5, 0.25, -0.125, 30}};
  CHECK(report::gradient_csv(cells, meta) == "# {\"seed\":1}\ns,q,ds,dq,replicates\n0,0.5,0.25,-0.125,30\n");
  const std::vector<std::uint32_t> row{5, 3, 1, 1};
  const auto d = strength_distribution(row);
  CHECK(report::ccdf_csv(d, meta) == "# {\"seed\":1}\nw,ccdf\n1,1\n3,0.5\n5,0.25\n");
  CHECK(report::histogram_csv(d, meta) == "# {\"seed\":1}\nw,count\n1,2\n3,1\n5,1\n");
  CHECK(Json::parse(report::fit_json(d, meta)).at("_meta") == meta);
}
