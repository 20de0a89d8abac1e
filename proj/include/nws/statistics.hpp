#ifndef NWS_STATISTICS_HPP
#define NWS_STATISTICS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "nws/error.hpp"

namespace nws {

/// Two-sided 95% normal quantile used for CIs and z-tests.
inline constexpr double kZ95 = 1.96;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct CosineResult {
  double value = 0.0;
  bool degenerate = false;  // one of the vectors had zero norm
};

inline CosineResult cosine(std::span<const double> u, std::span<const double> v) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) return {0.0, true};
  const double c = uv / (std::sqrt(uu) * std::sqrt(vv));
  return {std::clamp(c, -1.0, 1.0), false};
}

/// Pearson correlation with centred sums; result clamped to [-1, 1].
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("pearson: length mismatch");
  if (x.size() < 3) throw ConfigError("pearson: need at least 3 observations");
  const auto n = static_cast<double>(x.size());
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / n, my = sy.value() / n;
  CompensatedSum sxy, sxx, syy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy.add(dx * dy);
    sxx.add(dx * dx);
    syy.add(dy * dy);
  }
  if (sxx.value() == 0.0 || syy.value() == 0.0) throw NumericError("zero variance");
  const double r = sxy.value() / std::sqrt(sxx.value() * syy.value());
  return std::clamp(r, -1.0, 1.0);
}

/// F(r) = 1/2 ln((1 + r) / (1 - r)).
inline double fisher_transform(double r) {
  if (!(std::fabs(r) < 1.0)) throw DomainError("Fisher transform needs |r| < 1");
  return 0.5 * (std::log1p(r) - std::log1p(-r));
}

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
};

/// 95% interval tanh(F(r) -+ 1.96 / sqrt(n - 3)).
inline ConfidenceInterval fisher_ci(double r, std::size_t n) {
  if (n < 4) throw ConfigError("confidence interval needs n >= 4");
  const double f = fisher_transform(r);
  const double half = kZ95 / std::sqrt(static_cast<double>(n - 3));
  return {std::tanh(f - half), std::tanh(f + half)};
}

struct SignificanceResult {
  double z = 0.0;
  bool significant_at_05 = false;
  bool intervals_overlap = true;
};

/// Two-sample z-test on Fisher-transformed correlations.
inline SignificanceResult significance(double r1, std::size_t n1, double r2, std::size_t n2) {
  if (n1 < 4 || n2 < 4) throw ConfigError("significance test needs n >= 4");
  const double se = std::sqrt(1.0 / static_cast<double>(n1 - 3) + 1.0 / static_cast<double>(n2 - 3));
  SignificanceResult out;
  out.z = (fisher_transform(r1) - fisher_transform(r2)) / se;
  out.significant_at_05 = std::fabs(out.z) > kZ95;
  const auto a = fisher_ci(r1, n1), b = fisher_ci(r2, n2);
  out.intervals_overlap = a.low <= b.high && b.low <= a.high;
  return out;
}

struct CorrelationReport {
  double r = 0.0;
  std::size_t n = 0;
  double fisher = 0.0;  // +-inf when |r| = 1
  double ci_low = std::numeric_limits<double>::quiet_NaN();   // NaN when n < 4
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  std::size_t skipped_pairs = 0;
  std::size_t degenerate_vectors = 0;
};

/// Correlates x and y and attaches the Fisher value and 95% interval. A
/// perfect correlation collapses the interval onto r.
inline CorrelationReport correlation_report(std::span<const double> x, std::span<const double> y) {
  CorrelationReport rep;
  rep.r = pearson(x, y);
  rep.n = x.size();
  if (std::fabs(rep.r) >= 1.0) {
    rep.fisher = std::copysign(std::numeric_limits<double>::infinity(), rep.r);
    rep.ci_low = rep.ci_high = rep.r;
    return rep;
  }
  rep.fisher = fisher_transform(rep.r);
  if (rep.n >= 4) {
    const auto ci = fisher_ci(rep.r, rep.n);
    rep.ci_low = ci.low;
    rep.ci_high = ci.high;
  }
  return rep;
}

}  // namespace nws

#endif  // NWS_STATISTICS_HPP
