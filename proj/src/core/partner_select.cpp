#include "core/partner_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/types.hpp"

namespace groomsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log of the unnormalized kernel; -inf where the weight is zero.
double log_kernel(double d, double s) {
  if (s == 0.0) return 0.0;
  if (s > 0.0) return d == 0.0 ? kNegInf : s * std::log(d);
  return d == 1.0 ? kNegInf : -s * std::log1p(-d);
}

}  // namespace

KernelParams KernelParams::from_shape(double s) {
  if (s >= 0.0) return {1.0 + s, 1.0};
  return {1.0, 1.0 - s};
}

double selection_weight(double d, double s) {
  if (!(d >= 0.0 && d <= 1.0)) {
    throw DomainError("selection_weight: d must lie in [0, 1], got " + std::to_string(d));
  }
  if (!std::isfinite(s)) throw DomainError("selection_weight: s must be finite");
  if (s == 0.0) return 1.0;
  if (std::abs(s) > kLogSpaceShape) return std::exp(log_kernel(d, s));
  return s > 0.0 ? std::pow(d, s) : std::pow(1.0 - d, -s);
}

std::vector<double> normalized_strengths(std::span<const std::uint32_t> w_row) {
  const auto it = std::max_element(w_row.begin(), w_row.end());
  if (it == w_row.end() || *it == 0) {
    throw DomainError("normalized_strengths: row has no positive entry");
  }
  const double max = *it;
  std::vector<double> d(w_row.size());
  std::transform(w_row.begin(), w_row.end(), d.begin(),
                 [max](std::uint32_t w) { return w / max; });
  return d;
}

std::vector<double> selection_probabilities(std::span<const std::uint32_t> w_row, double s,
                                            KernelScope scope) {
  if (!std::isfinite(s)) throw DomainError("selection_probabilities: s must be finite");
  const std::vector<double> d = normalized_strengths(w_row);
  std::vector<double> p(w_row.size(), 0.0);
  std::vector<bool> candidate(w_row.size());
  for (std::size_t j = 0; j < w_row.size(); ++j) {
    candidate[j] = scope == KernelScope::AllGroomees || w_row[j] != 0;
  }

  if (std::abs(s) > kLogSpaceShape) {
    double top = kNegInf;
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (!candidate[j]) continue;
      p[j] = log_kernel(d[j], s);
      top = std::max(top, p[j]);
    }
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (!candidate[j]) continue;
      p[j] = top == kNegInf ? 0.0 : std::exp(p[j] - top);
    }
  } else {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (candidate[j]) p[j] = selection_weight(d[j], s);
    }
  }

  double total = 0.0;
  std::size_t candidates = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    total += p[j];
    candidates += candidate[j];
  }
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (!candidate[j]) continue;
    p[j] = total > 0.0 ? p[j] / total : 1.0 / static_cast<double>(candidates);
  }
  return p;
}

std::size_t select_partner(std::span<const std::uint32_t> w_row, double s, Rng& rng,
                           KernelScope scope) {
  const std::vector<double> p = selection_probabilities(w_row, s, scope);
  const double u = rng.uniform01();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    acc += p[j];
    last = j;
    if (u < acc) return j;
  }
  return last;
}

void KernelTable::reset(double s, std::uint32_t cap) {
  s_ = s;
  cap_ = cap;
  table_.resize(static_cast<std::size_t>(cap) + 1);
  // Entry k is (k / cap)^|s|; for s >= 0 it is indexed by w, for s < 0 by
  // max - w. Either way the ratio of two entries is the kernel ratio.
  const double a = std::abs(s);
  const double log_cap = std::log(static_cast<double>(std::max<std::uint32_t>(cap, 1)));
  table_[0] = a == 0.0 ? 1.0 : 0.0;
  for (std::uint32_t k = 1; k <= cap; ++k) {
    table_[k] = a == 0.0 ? 1.0 : std::exp(a * (std::log(static_cast<double>(k)) - log_cap));
  }
}

double KernelTable::log_weight(std::uint32_t w, std::uint32_t max) const {
  if (s_ == 0.0) return 0.0;
  const double log_max = std::log(static_cast<double>(max));
  if (s_ > 0.0) return w == 0 ? kNegInf : s_ * (std::log(static_cast<double>(w)) - log_max);
  return w == max ? kNegInf : -s_ * (std::log(static_cast<double>(max - w)) - log_max);
}

}  // namespace groomsim
