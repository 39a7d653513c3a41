#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/rng.hpp"
#include "core/types.hpp"

namespace groomsim {

// Beta-kernel parameters for shape s: (1 + s, 1) when s >= 0, (1, 1 - s)
// otherwise.
struct KernelParams {
  double alpha = 1.0;
  double beta = 1.0;

  static KernelParams from_shape(double s);
  double shape() const { return (alpha - 1.0) - (beta - 1.0); }
};

// |s| above which kernel weights are evaluated through logarithms.
inline constexpr double kLogSpaceShape = 30.0;

// Unnormalized kernel weight of a partner at normalized strength d:
// d^s for s >= 0 and (1 - d)^(-s) for s < 0. This is the beta density
// b(d; alpha, beta) without its 1/B(alpha, beta) factor, which cancels when
// weights are normalized over the candidates.
// Throws DomainError if d is outside [0, 1] or s is not finite.
double selection_weight(double d, double s);

// d_j = w_j / max(w). Throws DomainError when no entry is positive.
std::vector<double> normalized_strengths(std::span<const std::uint32_t> w_row);

// Probability of choosing each column of w_row on a partner-selection event:
// p_j = weight(d_j, s) / sum_k weight(d_k, s) over the candidate columns.
// Candidates are all columns under KernelScope::AllGroomees (w_j = 0 gives
// d_j = 0) and the columns with w_j > 0 under ExistingPartners; other columns
// get probability 0. If every candidate weight is zero (s < 0 with all
// candidates at the maximum) the candidates are equally likely.
// Throws DomainError if w_row has no positive entry.
std::vector<double> selection_probabilities(std::span<const std::uint32_t> w_row, double s,
                                            KernelScope scope = KernelScope::AllGroomees);

// Draws one column according to selection_probabilities.
// Consumes one uniform01() draw.
std::size_t select_partner(std::span<const std::uint32_t> w_row, double s, Rng& rng,
                           KernelScope scope = KernelScope::AllGroomees);

// Precomputed kernel weights for integer strengths, used by the grooming
// inner loop. For a row whose current maximum is `max`, weight(w, max) is
// proportional to selection_weight(w / max, s), with a proportionality factor
// that depends on max only, so the ratios between candidates are exact.
class KernelTable {
 public:
  KernelTable() = default;
  KernelTable(double s, std::uint32_t cap) { reset(s, cap); }

  // Rebuilds the table for strengths 0..cap.
  void reset(double s, std::uint32_t cap);

  double shape() const { return s_; }

  double weight(std::uint32_t w, std::uint32_t max) const {
    return s_ >= 0.0 ? table_[w] : table_[max - w];
  }

  // log(selection_weight(w / max, s)); -infinity for zero weight. Used when
  // the scaled table underflows.
  double log_weight(std::uint32_t w, std::uint32_t max) const;

 private:
  double s_ = 0.0;
  std::uint32_t cap_ = 0;
  std::vector<double> table_;
};

}  // namespace groomsim
