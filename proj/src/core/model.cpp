#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace groomsim {

namespace {

// Below this total the scaled kernel table may have lost candidates to
// underflow; the draw is then recomputed from log weights.
constexpr double kTableUnderflow = 1e-250;

}  // namespace

void GroomingWorkspace::load(std::span<std::uint32_t> w_row, std::uint32_t cap) {
  row_ = w_row;
  for (auto& bucket : buckets_) bucket.clear();
  if (buckets_.size() < static_cast<std::size_t>(cap) + 1) buckets_.resize(cap + 1);
  slot_.resize(w_row.size());
  distinct_.clear();
  max_ = 0;
  for (std::uint32_t j = 0; j < w_row.size(); ++j) {
    auto& bucket = buckets_[w_row[j]];
    if (w_row[j] > 0 && bucket.empty()) distinct_.push_back(w_row[j]);
    slot_[j] = static_cast<std::uint32_t>(bucket.size());
    bucket.push_back(j);
    max_ = std::max(max_, w_row[j]);
  }
}

void GroomingWorkspace::increment(std::uint32_t j) {
  const std::uint32_t v = row_[j];
  auto& from = buckets_[v];
  const std::uint32_t moved = from.back();
  from[slot_[j]] = moved;
  slot_[moved] = slot_[j];
  from.pop_back();
  if (v > 0 && from.empty()) {
    auto it = std::find(distinct_.begin(), distinct_.end(), v);
    *it = distinct_.back();
    distinct_.pop_back();
  }

  auto& to = buckets_[v + 1];
  if (to.empty()) distinct_.push_back(v + 1);
  slot_[j] = static_cast<std::uint32_t>(to.size());
  to.push_back(j);
  row_[j] = v + 1;
  max_ = std::max(max_, v + 1);
}

std::uint32_t GroomingWorkspace::draw_partner(Rng& rng, ExposureRow* tally) {
  // Candidate strengths: every positive strength present, plus 0 when
  // strangers take part in the kernel.
  values_.assign(distinct_.begin(), distinct_.end());
  if (strangers_in_kernel_ && !buckets_[0].empty()) values_.push_back(0);

  mass_.resize(values_.size());
  double total = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const std::uint32_t v = values_[k];
    mass_[k] = kernel_.weight(v, max_) * static_cast<double>(buckets_[v].size());
    total += mass_[k];
  }

  bool uniform = false;
  if (!(total > kTableUnderflow)) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values_.size(); ++k) {
      mass_[k] = kernel_.log_weight(values_[k], max_);
      top = std::max(top, mass_[k]);
    }
    if (std::isinf(top)) {
      // Every candidate has zero weight: choose uniformly among them.
      uniform = true;
      total = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        mass_[k] = static_cast<double>(buckets_[values_[k]].size());
        total += mass_[k];
      }
    } else {
      total = 0.0;
      for (std::size_t k = 0; k < values_.size(); ++k) {
        mass_[k] = std::exp(mass_[k] - top) * static_cast<double>(buckets_[values_[k]].size());
        total += mass_[k];
      }
    }
  }

  std::size_t pick = values_.size() - 1;
  if (uniform) {
    auto r = static_cast<double>(rng.uniform_index(static_cast<std::size_t>(total)));
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (r < mass_[k]) {
        pick = k;
        break;
      }
      r -= mass_[k];
    }
  } else {
    double u = rng.uniform01() * total;
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (mass_[k] <= 0.0) continue;
      pick = k;
      if (u < mass_[k]) break;
      u -= mass_[k];
    }
  }

  const std::uint32_t v = values_[pick];
  if (tally != nullptr) {
    if (tally->size() <= max_) tally->resize(static_cast<std::size_t>(max_) + 1);
    for (const std::uint32_t d : values_) (*tally)[d].exposures += buckets_[d].size();
    (*tally)[v].chosen += 1;
  }
  const auto& bucket = buckets_[v];
  return bucket[rng.uniform_index(bucket.size())];
}

void GroomingWorkspace::groom(const Strategy& strategy, std::span<std::uint32_t> w_row,
                              std::uint32_t actions, KernelScope scope, Rng& rng,
                              ExposureRow* tally) {
  strangers_in_kernel_ = scope == KernelScope::AllGroomees;
  const std::uint32_t start_max =
      w_row.empty() ? 0 : *std::max_element(w_row.begin(), w_row.end());
  const std::uint32_t cap = start_max + actions;
  load(w_row, cap);
  kernel_.reset(strategy.s, cap);

  const std::size_t m = w_row.size();
  for (std::uint32_t a = 0; a < actions; ++a) {
    const bool coin = rng.uniform01() < strategy.q;
    const std::size_t strangers = buckets_[0].size();
    const bool stranger = strangers == m || (strangers > 0 && coin);
    std::uint32_t j;
    if (stranger) {
      j = buckets_[0][rng.uniform_index(strangers)];
    } else {
      j = draw_partner(rng, tally);
    }
    increment(j);
  }
}

void grooming_stage(const Strategy& strategy, std::span<std::uint32_t> w_row,
                    const Environment& env, Rng& rng, ExposureRow* tally) {
  GroomingWorkspace workspace;
  workspace.groom(strategy, w_row, env.r_g, env.kernel_scope, rng, tally);
}

namespace {

// Orders eligible groomers by strength and leaves the winners in the prefix
// of the returned vector. `resolve(first, last, k)` must move k members of
// the tied range [first, last) to its front.
template <class Resolve>
std::vector<std::size_t> rank_column(std::span<const std::uint32_t> column, std::uint32_t r_c,
                                     Resolve&& resolve) {
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < column.size(); ++i) {
    if (column[i] > 0) eligible.push_back(i);
  }
  if (eligible.size() <= r_c) return eligible;

  std::sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    return column[a] != column[b] ? column[a] > column[b] : a < b;
  });
  const std::uint32_t cut = column[eligible[r_c - 1]];
  auto first = std::find_if(eligible.begin(), eligible.end(),
                            [&](std::size_t i) { return column[i] == cut; });
  auto last = std::find_if(first, eligible.end(), [&](std::size_t i) { return column[i] != cut; });
  const auto slots = static_cast<std::size_t>(r_c - (first - eligible.begin()));
  if (static_cast<std::size_t>(last - first) > slots) resolve(first, last, slots);
  eligible.resize(r_c);
  return eligible;
}

}  // namespace

std::vector<std::size_t> column_winners(std::span<const std::uint32_t> column, std::uint32_t r_c,
                                        Rng& rng) {
  return rank_column(column, r_c, [&rng](auto first, auto last, std::size_t k) {
    const auto n = static_cast<std::size_t>(last - first);
    for (std::size_t t = 0; t < k; ++t) {
      std::iter_swap(first + t, first + t + rng.uniform_index(n - t));
    }
  });
}

std::vector<std::size_t> column_winners_by_priority(std::span<const std::uint32_t> column,
                                                    std::uint32_t r_c,
                                                    std::span<const std::size_t> priority) {
  return rank_column(column, r_c, [priority](auto first, auto last, std::size_t) {
    std::sort(first, last, [priority](std::size_t a, std::size_t b) {
      return priority[a] < priority[b];
    });
  });
}

FitnessVector cooperation_stage(const RelationshipMatrix& w, const Environment& env, Rng& rng) {
  FitnessVector fitness(w.rows(), 0);
  std::vector<std::uint32_t> column(w.rows());
  for (std::size_t j = 0; j < w.cols(); ++j) {
    for (std::size_t i = 0; i < w.rows(); ++i) column[i] = w(i, j);
    for (const std::size_t i : column_winners(column, env.r_c, rng)) ++fitness[i];
  }
  return fitness;
}

}  // namespace groomsim
