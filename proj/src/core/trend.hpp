#pragma once

#include <string_view>

namespace groomsim {

enum class TrendLabel { Trend1 = 1, Trend2 = 2, Trend3 = 3, Trend4 = 4 };

// Decision rule over the final population medians:
//   s < s_low            -> Trend4 (diffuse weak-tie investment)
//   s >= s_high          -> Trend1 (concentrated investment)
//   otherwise q >= q_split -> Trend2, else Trend3.
struct TrendThresholds {
  double s_high = 2.0;
  double s_low = 0.0;
  double q_split = 0.5;
};

// Throws DomainError on NaN input.
TrendLabel classify_trend(double median_s, double median_q, const TrendThresholds& thresholds = {});

std::string_view to_string(TrendLabel label);
// Accepts "Trend1".."Trend4". Throws std::invalid_argument otherwise.
TrendLabel trend_from_string(std::string_view name);

}  // namespace groomsim
