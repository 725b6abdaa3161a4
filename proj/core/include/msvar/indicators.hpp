#pragma once

#include "msvar/timeseries.hpp"

#include <optional>
#include <string>
#include <vector>

namespace msvar {

enum class IndicatorKind { mpc, impc, euler_residual };

const char* to_string(IndicatorKind k) noexcept;

struct IndicatorPoint {
  int year = 0;
  std::optional<double> value;  // nullopt when flagged
  std::string flag;             // reason when flagged
};

struct IndicatorSeries {
  IndicatorKind kind = IndicatorKind::mpc;
  std::vector<IndicatorPoint> points;
  double guard_epsilon = 1e-3;

  /// Unflagged values only.
  std::vector<double> usable_values() const;
  /// As a Series; flagged entries become missing.
  Series to_series() const;
};

struct DiscountFactor {
  double r = 0.0;
  double beta = 1.0;
};

DiscountFactor discount_factor(double r);

constexpr double kDefaultGuardEpsilon = 1e-3;

/// dC_t / dY_t for every year after the first. Entries with dY_t == 0 or
/// |dY_t| < guard_epsilon * SD(dY) are flagged rather than computed.
IndicatorSeries mpc_series(const Series& consumption, const Series& income,
                           double guard_epsilon = kDefaultGuardEpsilon);

/// dC_{t+1} / dY_{t+1} stored at year t: the MPC series moved back one year.
IndicatorSeries impc_series(const Series& consumption, const Series& income,
                            double guard_epsilon = kDefaultGuardEpsilon);

/// [ln C_t - ln C_{t+1}] - [ln(1+r) + ln(beta)] at year t.
IndicatorSeries euler_residual(const Series& consumption, double r, double beta);

}  // namespace msvar
