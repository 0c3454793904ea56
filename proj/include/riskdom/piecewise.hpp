#pragma once

// Densities whose logarithm is a quadratic polynomial on each interval
// between knots. Continuous at the knots, with finite one-sided log-derivative
// limits there.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "riskdom/detail/numeric.hpp"
#include "riskdom/error.hpp"

namespace riskdom {

enum class Side { left, right };

/// log g(a) = c0 + c1 d + c2 d^2 with d = a - origin, on one segment (before
/// normalisation). Translations only move the origin, so shifting a far-off
/// distribution does not cost precision in the coefficients.
struct LogQuadratic {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double origin = 0.0;

  double operator()(double a) const noexcept {
    const double d = a - origin;
    return c0 + d * (c1 + d * c2);
  }
  double slope(double a) const noexcept { return c1 + 2.0 * c2 * (a - origin); }
  /// Stationary point; requires c2 != 0.
  double vertex() const noexcept { return origin - c1 / (2.0 * c2); }

  friend bool operator==(const LogQuadratic&, const LogQuadratic&) = default;
};

class PiecewiseExpPoly {
 public:
  PiecewiseExpPoly(std::vector<double> knots, std::vector<LogQuadratic> pieces)
      : knots_(std::move(knots)), pieces_(std::move(pieces)) {
    validate();
    normalise();
  }

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const LogQuadratic> pieces() const noexcept { return pieces_; }
  std::size_t segments() const noexcept { return pieces_.size(); }

  double lower_edge(std::size_t i) const noexcept {
    return i == 0 ? -detail::inf : knots_[i - 1];
  }
  double upper_edge(std::size_t i) const noexcept {
    return i == knots_.size() ? detail::inf : knots_[i];
  }

  /// Segment containing a; knots belong to the segment on their right.
  std::size_t segment_of(double a) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(knots_.begin(), knots_.end(), a) -
                                    knots_.begin());
  }

  double log_density(double a) const noexcept {
    return pieces_[segment_of(a)](a) - log_norm_;
  }
  double density(double a) const noexcept { return std::exp(log_density(a)); }

  double log_density_derivative(double a, Side side) const noexcept {
    std::size_t i = segment_of(a);
    if (side == Side::left && i > 0 && a == knots_[i - 1]) --i;
    return pieces_[i].slope(a);
  }

  double cdf(double a) const {
    if (a == -detail::inf) return 0.0;
    if (a == detail::inf) return 1.0;
    const std::size_t i = segment_of(a);
    return std::min(1.0, mass_below_[i] + partial(i, lower_edge(i), a));
  }
  double survival(double a) const {
    if (a == -detail::inf) return 1.0;
    if (a == detail::inf) return 0.0;
    const std::size_t i = segment_of(a);
    return std::min(1.0, mass_above_[i] + partial(i, a, upper_edge(i)));
  }

  /// E[(a - W)^+].
  double integrated_cdf(double a) const {
    const std::size_t i = segment_of(a);
    detail::compensated_sum s;
    for (std::size_t j = 0; j < i; ++j) s += a * mass_[j] - first_moment_[j];
    s += partial_linear(i, lower_edge(i), a, a, true);
    return s.value();
  }
  /// E[(W - a)^+].
  double upper_partial_moment(double a) const {
    const std::size_t i = segment_of(a);
    detail::compensated_sum s;
    for (std::size_t j = i + 1; j < pieces_.size(); ++j) s += first_moment_[j] - a * mass_[j];
    s += partial_linear(i, a, upper_edge(i), a, false);
    return s.value();
  }

  double mean() const noexcept { return mean_; }
  double stdev() const noexcept { return stdev_; }

  double quantile(double p) const {
    if (p <= 0.0) return -detail::inf;
    if (p >= 1.0) return detail::inf;
    return solve([this](double a) { return cdf(a); }, p, true);
  }
  /// Point a with P(W > a) = q.
  double upper_quantile(double q) const {
    if (q <= 0.0) return detail::inf;
    if (q >= 1.0) return -detail::inf;
    return solve([this](double a) { return survival(a); }, q, false);
  }

  PiecewiseExpPoly shifted(double c) const {
    std::vector<double> k = knots_;
    for (auto& x : k) x += c;
    std::vector<LogQuadratic> p = pieces_;
    for (auto& q : p) q.origin += c;
    return {std::move(k), std::move(p)};
  }
  PiecewiseExpPoly scaled(double t) const {
    std::vector<double> k = knots_;
    for (auto& x : k) x *= t;
    std::vector<LogQuadratic> p = pieces_;
    for (auto& q : p) q = {q.c0 - std::log(t), q.c1 / t, q.c2 / (t * t), q.origin * t};
    return {std::move(k), std::move(p)};
  }

 private:
  void validate() const {
    if (pieces_.size() != knots_.size() + 1)
      throw error(errc::invalid_distribution, "need one log-polynomial per segment");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      if (!std::isfinite(knots_[i]) || (i > 0 && knots_[i] <= knots_[i - 1]))
        throw error(errc::invalid_distribution, "knots must be finite and increasing");
    }
    for (const auto& q : pieces_)
      if (!std::isfinite(q.c0) || !std::isfinite(q.c1) || !std::isfinite(q.c2) ||
          !std::isfinite(q.origin))
        throw error(errc::invalid_distribution, "non-finite coefficient");
    for (std::size_t i = 0; i < knots_.size(); ++i) {
      const double l = pieces_[i](knots_[i]);
      const double r = pieces_[i + 1](knots_[i]);
      if (std::abs(l - r) > 1e-9 * std::max(1.0, std::abs(l)))
        throw error(errc::invalid_distribution, "density is discontinuous at a knot");
    }
    const auto& first = pieces_.front();
    const auto& last = pieces_.back();
    if (!(first.c2 < 0.0 || (first.c2 == 0.0 && first.c1 > 0.0)))
      throw error(errc::invalid_distribution, "left tail is not integrable");
    if (!(last.c2 < 0.0 || (last.c2 == 0.0 && last.c1 < 0.0)))
      throw error(errc::invalid_distribution, "right tail is not integrable");
  }

  // Upper bound of the unnormalised log-density over all segments.
  double log_peak() const {
    double m = -detail::inf;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& q = pieces_[i];
      const double lo = lower_edge(i), hi = upper_edge(i);
      if (std::isfinite(lo)) m = std::max(m, q(lo));
      if (std::isfinite(hi)) m = std::max(m, q(hi));
      if (q.c2 < 0.0) {
        const double v = q.vertex();
        if (v > lo && v < hi) m = std::max(m, q(v));
      }
    }
    return m;
  }

  template <class W>
  double integrate_piece(std::size_t i, double lo, double hi, double shift, W&& weight) const {
    if (!(hi > lo)) return 0.0;
    const auto& q = pieces_[i];
    auto f = [&](double t) { return weight(t) * std::exp(q(t) - shift); };
    using boost::math::quadrature::gauss_kronrod;
    if (std::isinf(lo) || std::isinf(hi))
      return gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-14);
    // Finite pieces are mapped onto [0, 1]; on very short intervals the
    // adaptive rule otherwise keeps bisecting against an absolute error floor.
    const double width = hi - lo;
    auto g = [&](double u) { return f(lo + u * width); };
    return width * gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, 1e-14);
  }

  // Mass of segment i on [lo, hi]. Linear and concave log-densities have
  // closed forms; the rest (bounded convex pieces) fall back to quadrature.
  double partial(std::size_t i, double lo, double hi) const {
    if (!(hi > lo)) return 0.0;
    const auto& q = pieces_[i];
    if (q.c2 == 0.0) {
      if (q.c1 == 0.0) return (hi - lo) * std::exp(q.c0 - log_norm_);
      // Anchor at the heavier end so the exponent never overflows.
      if (q.c1 > 0.0) return std::exp(q(hi) - log_norm_) * -std::expm1(-q.c1 * (hi - lo)) / q.c1;
      return std::exp(q(lo) - log_norm_) * -std::expm1(q.c1 * (hi - lo)) / -q.c1;
    }
    if (q.c2 < 0.0) {
      const double v = q.vertex(), sd = std::sqrt(-0.5 / q.c2);
      const double zl = (lo - v) / sd, zh = (hi - v) / sd;
      // Far out in one tail erfc loses relative accuracy; integrate instead.
      if (zl > 20.0 || zh < -20.0)
        return integrate_piece(i, lo, hi, log_norm_, [](double) { return 1.0; });
      const double mass = zl >= 0.0   ? 0.5 * (std::erfc(zl / std::numbers::sqrt2) -
                                                std::erfc(zh / std::numbers::sqrt2))
                          : zh <= 0.0 ? 0.5 * (std::erfc(-zh / std::numbers::sqrt2) -
                                               std::erfc(-zl / std::numbers::sqrt2))
                                      : 1.0 - 0.5 * (std::erfc(-zl / std::numbers::sqrt2) +
                                                     std::erfc(zh / std::numbers::sqrt2));
      return std::exp(q(v) - log_norm_) * sd * std::sqrt(2.0 * std::numbers::pi) * mass;
    }
    return integrate_piece(i, lo, hi, log_norm_, [](double) { return 1.0; });
  }
  // Integral of |t - a| g(t) over [lo, hi] of segment i, where a is hi when
  // below is set and lo otherwise.
  double partial_linear(std::size_t i, double lo, double hi, double a, bool below) const {
    if (!(hi > lo)) return 0.0;
    const auto& q = pieces_[i];
    auto g = [&](double t) { return std::isinf(t) ? 0.0 : std::exp(q(t) - log_norm_); };
    if (q.c2 == 0.0) {
      // With s = |t - a|: g(a) * int_0^L s e^{ks} ds.
      const double k = below ? -q.c1 : q.c1, len = hi - lo, x = std::abs(k) * len;
      if (x >= 0.1) {
        if (k < 0.0) return g(a) * (std::isinf(len) ? 1.0 : -std::expm1(-x) - x * std::exp(-x)) / (k * k);
        // Growing away from a: anchor at the far end.
        return g(below ? lo : hi) * (x + std::expm1(-x)) / (k * k);
      }
    } else if (q.c2 < 0.0) {
      const double v = q.vertex(), sd = std::sqrt(-0.5 / q.c2), z = (a - v) / sd;
      // Stable while a sits on the bulk side of the vertex.
      if (below && z >= -1.0) return (a - v) * partial(i, lo, hi) + sd * sd * (g(hi) - g(lo));
      if (!below && z <= 1.0) return (v - a) * partial(i, lo, hi) + sd * sd * (g(lo) - g(hi));
    }
    return integrate_piece(i, lo, hi, log_norm_,
                           [a, below](double t) { return below ? a - t : t - a; });
  }

  void normalise() {
    const double peak = log_peak();
    const std::size_t n = pieces_.size();
    std::vector<double> raw(n);
    detail::compensated_sum total;
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = integrate_piece(i, lower_edge(i), upper_edge(i), peak, [](double) { return 1.0; });
      total += raw[i];
    }
    log_norm_ = peak + std::log(total.value());
    mass_.resize(n);
    first_moment_.resize(n);
    detail::compensated_sum m1;
    for (std::size_t i = 0; i < n; ++i) {
      mass_[i] = raw[i] / total.value();
      first_moment_[i] =
          integrate_piece(i, lower_edge(i), upper_edge(i), log_norm_, [](double t) { return t; });
      m1 += first_moment_[i];
    }
    mean_ = m1.value();
    detail::compensated_sum m2;
    for (std::size_t i = 0; i < n; ++i)
      m2 += integrate_piece(i, lower_edge(i), upper_edge(i), log_norm_,
                            [this](double t) { return (t - mean_) * (t - mean_); });
    stdev_ = std::sqrt(m2.value());
    mass_below_.assign(n, 0.0);
    mass_above_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) mass_below_[i] = mass_below_[i - 1] + mass_[i - 1];
    for (std::size_t i = n - 1; i-- > 0;) mass_above_[i] = mass_above_[i + 1] + mass_[i + 1];
  }

  // Root of f(a) = target where f is the cdf (increasing) or survival
  // (decreasing). Brackets on segment edges, expanding into the tails.
  template <class F>
  double solve(F&& f, double target, bool increasing) const {
    const double width = std::max(stdev_, 1e-300);
    double lo = knots_.empty() ? mean_ - width : knots_.front();
    double hi = knots_.empty() ? mean_ + width : knots_.back();
    auto below = [&](double a) { return increasing ? f(a) < target : f(a) > target; };
    for (double step = width; below(hi); step *= 2.0) hi += step;
    for (double step = width; !below(lo); step *= 2.0) lo -= step;
    auto g = [&](double a) { return increasing ? f(a) - target : target - f(a); };
    boost::uintmax_t iters = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(52);
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, iters);
    return 0.5 * (a + b);
  }

  std::vector<double> knots_;
  std::vector<LogQuadratic> pieces_;
  double log_norm_ = 0.0;
  std::vector<double> mass_, first_moment_, mass_below_, mass_above_;
  double mean_ = 0.0;
  double stdev_ = 0.0;
};

}  // namespace riskdom
