/// @file rate.h
/// Constant transition and occurrence rates.

#pragma once

#include <string_view>

namespace ghcft {

/// Whether a rate drives the system towards failure or back to service.
enum class RateKind { kFailure, kRepair };

/// The unit a rate was written in. Internally everything is per hour.
enum class RateUnit { kPerHour, kFit };

/// Conversion factor between per-hour rates and FIT (failures per 1e9 h).
inline constexpr double kFitPerHour = 1e9;

/// A nonnegative, finite intensity.
///
/// The value is kept in the unit it was created with so that
/// `Rate::Fit(x).fit() == x` holds bit-exactly;
/// the per-hour view of a FIT rate is derived on demand.
class Rate {
 public:
  Rate() = default;

  /// @throws DomainError  The value is negative, NaN or infinite.
  static Rate PerHour(double value, RateKind kind = RateKind::kFailure);
  static Rate Fit(double value, RateKind kind = RateKind::kFailure);

  double per_hour() const {
    return unit_ == RateUnit::kFit ? value_ / kFitPerHour : value_;
  }
  double fit() const {
    return unit_ == RateUnit::kFit ? value_ : value_ * kFitPerHour;
  }

  /// The magnitude in the unit of creation.
  double value() const { return value_; }
  RateUnit unit() const { return unit_; }
  RateKind kind() const { return kind_; }

  bool is_zero() const { return value_ == 0; }

  bool operator==(const Rate&) const = default;

 private:
  Rate(double value, RateUnit unit, RateKind kind)
      : value_(value), unit_(unit), kind_(kind) {}

  double value_ = 0;
  RateUnit unit_ = RateUnit::kPerHour;
  RateKind kind_ = RateKind::kFailure;
};

std::string_view to_string(RateKind kind);

/// Mean time between failures for a constant rate; infinity for rate 0.
double mtbf_hours(double per_hour_rate);

}  // namespace ghcft
