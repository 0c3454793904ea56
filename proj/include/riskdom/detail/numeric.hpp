#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace riskdom::detail {

inline constexpr double inf = std::numeric_limits<double>::infinity();
inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

/// Neumaier-compensated accumulator.
class compensated_sum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  compensated_sum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// log(sum_i w_i * exp(e_i)) with the max exponent factored out.
inline double log_weighted_sum_exp(std::span<const double> weights,
                                   std::span<const double> exponents) {
  double m = -inf;
  for (double e : exponents) m = std::max(m, e);
  if (!std::isfinite(m)) return m;
  compensated_sum s;
  for (std::size_t i = 0; i < weights.size(); ++i)
    s += weights[i] * std::exp(exponents[i] - m);
  return m + std::log(s.value());
}

/// Golden-section maximisation of a unimodal f on [lo, hi]. Returns the
/// abscissa of the best point seen.
template <class F>
double golden_section_argmax(F&& f, double lo, double hi, int iterations = 120) {
  constexpr double invphi = 0.6180339887498948482;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++i) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

}  // namespace riskdom::detail
