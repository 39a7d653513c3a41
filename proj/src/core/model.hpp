#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/partner_select.hpp"
#include "core/rng.hpp"
#include "core/types.hpp"

namespace groomsim {

// Partner-selection statistics for one groomer, indexed by strength w:
// how many times a candidate at strength w was available when an existing
// partner was chosen, and how many of those times it was the one chosen.
struct ExposureTally {
  std::uint64_t exposures = 0;
  std::uint64_t chosen = 0;
};
using ExposureRow = std::vector<ExposureTally>;

// Reusable buffers for the grooming stage. Groomees are kept in buckets by
// their current strength so that a partner draw costs one pass over the
// distinct strengths in the row rather than over all M groomees.
class GroomingWorkspace {
 public:
  // Performs `actions` grooming events on w_row (see grooming_stage).
  void groom(const Strategy& strategy, std::span<std::uint32_t> w_row, std::uint32_t actions,
             KernelScope scope, Rng& rng, ExposureRow* tally = nullptr);

 private:
  void load(std::span<std::uint32_t> w_row, std::uint32_t cap);
  void increment(std::uint32_t j);
  std::uint32_t draw_partner(Rng& rng, ExposureRow* tally);

  std::span<std::uint32_t> row_;
  std::vector<std::vector<std::uint32_t>> buckets_;
  std::vector<std::uint32_t> slot_;
  std::vector<std::uint32_t> distinct_;
  std::vector<std::uint32_t> values_;
  std::vector<double> mass_;
  bool strangers_in_kernel_ = true;
  std::uint32_t max_ = 0;
  KernelTable kernel_;
};

// Runs env.r_g grooming events for one groomer. Each event draws a coin
// (one uniform01); with probability q a stranger (w_j = 0) is groomed,
// chosen uniformly, otherwise the groomee is drawn from the beta kernel
// (see selection_probabilities for env.kernel_scope). With no partners yet a
// stranger is groomed; with no strangers left the kernel draw is used. The
// row sum grows by exactly env.r_g.
void grooming_stage(const Strategy& strategy, std::span<std::uint32_t> w_row,
                    const Environment& env, Rng& rng, ExposureRow* tally = nullptr);

// Groomers that receive groomee j's cooperation given column j of w.
// Eligible groomers have w_ij > 0; the top min(r_c, #eligible) by strength
// win, and a tie straddling the cut is resolved by a uniform draw of the
// remaining slots from the tied group. No draw is consumed without such a tie.
std::vector<std::size_t> column_winners(std::span<const std::uint32_t> column, std::uint32_t r_c,
                                        Rng& rng);

// As column_winners, but a straddling tie is resolved in favour of the lowest
// priority[i]. Deterministic; used to check ranking properties exhaustively.
std::vector<std::size_t> column_winners_by_priority(std::span<const std::uint32_t> column,
                                                    std::uint32_t r_c,
                                                    std::span<const std::size_t> priority);

// Fitness of every groomer: the number of groomees whose cooperation it
// receives. Columns are processed in index order.
FitnessVector cooperation_stage(const RelationshipMatrix& w, const Environment& env, Rng& rng);

}  // namespace groomsim
