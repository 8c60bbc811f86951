#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace lspace {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// u-coordinate of a point t in (0,1]: u = log(e/t) = 1 - log(t), u >= 1.
inline double u_of_t(double t) { return 1.0 - std::log(t); }

/// Inverse map, t = e^{1-u}. Underflows to 0 for u beyond ~745.
inline double t_of_u(double u) { return std::exp(1.0 - u); }

/// log(a + b) given log(a) and log(b); tolerates -inf on either side.
inline double log_add_exp(double la, double lb) {
  if (la == kNegInf) return lb;
  if (lb == kNegInf) return la;
  const double hi = la > lb ? la : lb;
  const double lo = la > lb ? lb : la;
  return hi + std::log1p(std::exp(lo - hi));
}

/// log(Sigma exp(terms)), computed with a max shift. Empty input -> -inf.
inline double log_sum_exp(const std::vector<double>& terms) {
  double hi = kNegInf;
  for (double x : terms)
    if (x > hi) hi = x;
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : terms) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// Neumaier-compensated accumulator; summation order is the caller's.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

/// Deterministic uniform in [0,1) from a 64-bit generator draw.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace lspace
