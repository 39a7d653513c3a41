#include "core/trend.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "core/types.hpp"

namespace groomsim {

TrendLabel classify_trend(double median_s, double median_q, const TrendThresholds& thresholds) {
  if (std::isnan(median_s) || std::isnan(median_q)) {
    throw DomainError("classify_trend: NaN median");
  }
  if (median_s < thresholds.s_low) return TrendLabel::Trend4;
  if (median_s >= thresholds.s_high) return TrendLabel::Trend1;
  return median_q >= thresholds.q_split ? TrendLabel::Trend2 : TrendLabel::Trend3;
}

std::string_view to_string(TrendLabel label) {
  switch (label) {
    case TrendLabel::Trend1: return "Trend1";
    case TrendLabel::Trend2: return "Trend2";
    case TrendLabel::Trend3: return "Trend3";
    case TrendLabel::Trend4: return "Trend4";
  }
  return "Trend?";
}

TrendLabel trend_from_string(std::string_view name) {
  if (name == "Trend1") return TrendLabel::Trend1;
  if (name == "Trend2") return TrendLabel::Trend2;
  if (name == "Trend3") return TrendLabel::Trend3;
  if (name == "Trend4") return TrendLabel::Trend4;
  throw std::invalid_argument("unknown trend label '" + std::string(name) + "'");
}

}  // namespace groomsim
