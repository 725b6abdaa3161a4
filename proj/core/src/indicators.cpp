#include "msvar/indicators.hpp"

#include "msvar/error.hpp"

#include <cmath>
#include <numeric>

namespace msvar {

namespace {

void require_aligned(const Series& a, const Series& b, std::size_t min_len) {
  if (a.years != b.years) throw ValidationError("indicator inputs are not aligned on the same years");
  if (a.size() < min_len) {
    throw ValidationError("indicator inputs need at least " + std::to_string(min_len) +
                          " observations, got " + std::to_string(a.size()));
  }
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

const char* to_string(IndicatorKind k) noexcept {
  switch (k) {
    case IndicatorKind::mpc: return "MPC";
    case IndicatorKind::impc: return "IMPC";
    case IndicatorKind::euler_residual: return "EulerResidual";
  }
  return "";
}

std::vector<double> IndicatorSeries::usable_values() const {
  std::vector<double> out;
  for (const auto& p : points) {
    if (p.value) out.push_back(*p.value);
  }
  return out;
}

Series IndicatorSeries::to_series() const {
  Series s;
  for (const auto& p : points) {
    s.years.push_back(p.year);
    s.values.push_back(p.value);
  }
  return s;
}

DiscountFactor discount_factor(double r) {
  if (!(r > -1.0)) throw ValidationError("discount_factor: r must exceed -1");
  return {r, 1.0 / (1.0 + r)};
}

IndicatorSeries mpc_series(const Series& consumption, const Series& income, double guard_epsilon) {
  require_aligned(consumption, income, 2);
  const auto c = consumption.dense("consumption");
  const auto y = income.dense("income");
  std::vector<double> dc;
  std::vector<double> dy;
  for (std::size_t t = 1; t < c.size(); ++t) {
    dc.push_back(c[t] - c[t - 1]);
    dy.push_back(y[t] - y[t - 1]);
  }
  const double threshold = guard_epsilon * sample_sd(dy);

  IndicatorSeries out;
  out.kind = IndicatorKind::mpc;
  out.guard_epsilon = guard_epsilon;
  for (std::size_t i = 0; i < dy.size(); ++i) {
    IndicatorPoint p;
    p.year = consumption.years[i + 1];
    if (dy[i] == 0.0 || std::abs(dy[i]) < threshold) {
      p.flag = "income change below guard threshold";
    } else {
      p.value = dc[i] / dy[i];
    }
    out.points.push_back(std::move(p));
  }
  return out;
}

IndicatorSeries impc_series(const Series& consumption, const Series& income, double guard_epsilon) {
  require_aligned(consumption, income, 3);
  const auto mpc = mpc_series(consumption, income, guard_epsilon);
  IndicatorSeries out;
  out.kind = IndicatorKind::impc;
  out.guard_epsilon = guard_epsilon;
  // mpc.points[i] sits at year i+1; IMPC at year t takes the MPC of year t+1.
  for (std::size_t i = 1; i < mpc.points.size(); ++i) {
    IndicatorPoint p = mpc.points[i];
    p.year = mpc.points[i - 1].year;
    out.points.push_back(std::move(p));
  }
  return out;
}

IndicatorSeries euler_residual(const Series& consumption, double r, double beta) {
  if (consumption.size() < 2) throw ValidationError("euler_residual: need at least two observations");
  if (!(r > -1.0) || !(beta > 0.0)) throw ValidationError("euler_residual: need r > -1 and beta > 0");
  const auto c = consumption.dense("consumption");
  for (std::size_t t = 0; t < c.size(); ++t) {
    if (!(c[t] > 0.0)) {
      throw ValidationError("euler_residual: consumption is not positive in year " +
                            std::to_string(consumption.years[t]));
    }
  }
  const double rhs = std::log1p(r) + std::log(beta);
  IndicatorSeries out;
  out.kind = IndicatorKind::euler_residual;
  for (std::size_t t = 0; t + 1 < c.size(); ++t) {
    out.points.push_back({consumption.years[t], (std::log(c[t]) - std::log(c[t + 1])) - rhs, {}});
  }
  return out;
}

}  // namespace msvar
