#include "ghcft/rate.h"

#include <cmath>
#include <limits>
#include <string>

#include "ghcft/error.h"

namespace ghcft {

namespace {

void CheckValue(double value) {
  if (!std::isfinite(value) || value < 0)
    throw DomainError("rate must be finite and nonnegative, got " +
                      std::to_string(value));
}

}  // namespace

Rate Rate::PerHour(double value, RateKind kind) {
  CheckValue(value);
  return Rate(value, RateUnit::kPerHour, kind);
}

Rate Rate::Fit(double value, RateKind kind) {
  CheckValue(value);
  return Rate(value, RateUnit::kFit, kind);
}

std::string_view to_string(RateKind kind) {
  return kind == RateKind::kRepair ? "repair" : "failure";
}

double mtbf_hours(double per_hour_rate) {
  if (per_hour_rate <= 0) return std::numeric_limits<double>::infinity();
  return 1.0 / per_hour_rate;
}

}  // namespace ghcft
