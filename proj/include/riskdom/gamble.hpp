#pragma once

// Bounded discrete gambles and their riskiness index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskdom/detail/numeric.hpp"
#include "riskdom/error.hpp"

namespace riskdom {

struct Outcome {
  double value;        ///< dollars
  double probability;  ///< in (0, 1]

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// A finite discrete gamble. Outcomes are stored sorted by value with equal
/// values merged. Construction validates the distribution; a gamble with a
/// single support point must be requested through Gamble::degenerate.
class Gamble {
 public:
  static constexpr double sum_tolerance = 1e-12;
  static constexpr double drop_threshold = 1e-15;

  explicit Gamble(std::vector<Outcome> outcomes) : Gamble(std::move(outcomes), false) {}

  static Gamble degenerate(double value) { return Gamble({{value, 1.0}}, true); }

  /// Fifty-fifty gamble: win `gain` or lose `loss` (both given as positive numbers).
  static Gamble fifty_fifty(double gain, double loss) {
    return Gamble({{gain, 0.5}, {-loss, 0.5}});
  }

  /// Accepts one-point lotteries as well; used where degenerate inputs are legal.
  static Gamble from_outcomes(std::vector<Outcome> outcomes, bool allow_degenerate) {
    return Gamble(std::move(outcomes), allow_degenerate);
  }

  std::span<const Outcome> outcomes() const noexcept { return outcomes_; }
  std::size_t size() const noexcept { return outcomes_.size(); }

  double min() const noexcept { return outcomes_.front().value; }
  double max() const noexcept { return outcomes_.back().value; }
  /// Support bound M = max |x|.
  double support_bound() const noexcept {
    return std::max(std::abs(min()), std::abs(max()));
  }
  bool is_degenerate() const noexcept { return outcomes_.size() == 1; }
  /// Set when near-zero probabilities were dropped and the rest renormalised.
  bool pruned() const noexcept { return pruned_; }

  /// P(X <= z).
  double cdf(double z) const noexcept {
    detail::compensated_sum s;
    for (const auto& o : outcomes_) {
      if (o.value > z) break;
      s += o.probability;
    }
    return std::min(1.0, s.value());
  }

  /// Equality of distributions (the pruning flag is not compared).
  friend bool operator==(const Gamble& a, const Gamble& b) { return a.outcomes_ == b.outcomes_; }

 private:
  Gamble(std::vector<Outcome> outcomes, bool allow_degenerate);

  std::vector<Outcome> outcomes_;
  bool pruned_ = false;
};

inline Gamble::Gamble(std::vector<Outcome> outcomes, bool allow_degenerate) {
  if (outcomes.empty()) throw error(errc::invalid_gamble, "no outcomes");
  detail::compensated_sum total;
  for (const auto& o : outcomes) {
    if (!std::isfinite(o.value)) throw error(errc::invalid_gamble, "non-finite outcome value");
    if (!std::isfinite(o.probability) || o.probability < 0.0 || o.probability > 1.0)
      throw error(errc::invalid_gamble, "probability outside [0, 1]");
    total += o.probability;
  }
  if (std::abs(total.value() - 1.0) > sum_tolerance)
    throw error(errc::invalid_gamble, "probabilities do not sum to 1");

  std::sort(outcomes.begin(), outcomes.end(),
            [](const Outcome& a, const Outcome& b) { return a.value < b.value; });
  detail::compensated_sum kept;
  for (const auto& o : outcomes) {
    if (o.probability < drop_threshold) {
      pruned_ = true;
      continue;
    }
    if (!outcomes_.empty() && outcomes_.back().value == o.value)
      outcomes_.back().probability += o.probability;
    else
      outcomes_.push_back(o);
    kept += o.probability;
  }
  if (outcomes_.empty()) throw error(errc::invalid_gamble, "all probabilities negligible");
  const double norm = kept.value();
  for (auto& o : outcomes_) o.probability /= norm;
  if (outcomes_.size() == 1 && !allow_degenerate)
    throw error(errc::invalid_gamble, "single support point; use a degenerate gamble");
}

inline double mean(const Gamble& g) {
  detail::compensated_sum s;
  for (const auto& o : g.outcomes()) s += o.probability * o.value;
  return s.value();
}

/// log E[exp(-alpha X)], evaluated with the largest exponent factored out so
/// that alpha * M may exceed the range of exp.
inline double log_moment(const Gamble& g, double alpha) {
  std::vector<double> w, e;
  w.reserve(g.size());
  e.reserve(g.size());
  for (const auto& o : g.outcomes()) {
    w.push_back(o.probability);
    e.push_back(-alpha * o.value);
  }
  return detail::log_weighted_sum_exp(w, e);
}

struct RiskinessResult {
  double riskiness;  ///< R(X)
  double alpha;      ///< 1 / R(X)
  double residual;   ///< |E[exp(-X/R)] - 1|
  int iterations;
};

namespace detail {
inline void require_riskiness_domain(const Gamble& g) {
  if (mean(g) <= 0.0) throw error(errc::non_positive_mean);
  if (g.min() >= 0.0) throw error(errc::no_downside);
}
}  // namespace detail

/// Riskiness: the unique R > 0 with E[exp(-X/R)] = 1.
///
/// Bisection on alpha = 1/R. The lower end starts at eps/M^2, where the
/// moment is at most one; the upper end doubles until the moment exceeds one.
/// The returned alpha is the lower bracket end, so E[exp(-X/R)] <= 1 holds
/// up to rounding.
inline RiskinessResult riskiness(const Gamble& g) {
  detail::require_riskiness_domain(g);
  const double eps = mean(g);
  const double m = g.support_bound();
  double lo = eps / (m * m);
  double hi = 2.0 * lo;
  int iterations = 0;
  while (log_moment(g, hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++iterations > 2000) throw error(errc::numerical_failure, "riskiness bracket");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++iterations;
    if (log_moment(g, mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double residual = std::abs(std::expm1(log_moment(g, lo)));
  return {1.0 / lo, lo, residual, iterations};
}

/// Upper bound M^2 / E[X] on the riskiness.
inline double riskiness_bound(const Gamble& g) {
  const double eps = mean(g);
  if (eps <= 0.0) throw error(errc::non_positive_mean);
  const double m = g.support_bound();
  return m * m / eps;
}

inline Gamble scale(const Gamble& g, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw error(errc::non_positive_scale);
  std::vector<Outcome> out(g.outcomes().begin(), g.outcomes().end());
  for (auto& o : out) o.value *= t;
  return Gamble::from_outcomes(std::move(out), g.is_degenerate());
}

inline Gamble shift(const Gamble& g, double c) {
  std::vector<Outcome> out(g.outcomes().begin(), g.outcomes().end());
  for (auto& o : out) o.value += c;
  return Gamble::from_outcomes(std::move(out), g.is_degenerate());
}

}  // namespace riskdom
