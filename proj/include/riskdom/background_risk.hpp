#pragma once

// Background-risk distributions W and their exponential-size indices.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "riskdom/detail/numeric.hpp"
#include "riskdom/error.hpp"
#include "riskdom/piecewise.hpp"

namespace riskdom {

enum class Family { laplace, logistic, normal, piecewise };

constexpr std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::laplace: return "laplace";
    case Family::logistic: return "logistic";
    case Family::normal: return "normal";
    case Family::piecewise: return "piecewise";
  }
  return "unknown";
}

namespace family {

/// g(a) = exp(-|a - mu| / lambda) / (2 lambda).
struct Laplace {
  double mu;
  double lambda;

  double log_density(double a) const noexcept {
    return -std::abs(a - mu) / lambda - std::log(2.0 * lambda);
  }
  double log_density_derivative(double a, Side side) const noexcept {
    if (a < mu || (a == mu && side == Side::left)) return 1.0 / lambda;
    return -1.0 / lambda;
  }
  double cdf(double a) const noexcept {
    const double z = (a - mu) / lambda;
    return z <= 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  }
  double survival(double a) const noexcept {
    const double z = (a - mu) / lambda;
    return z >= 0.0 ? 0.5 * std::exp(-z) : 1.0 - 0.5 * std::exp(z);
  }
  // G(a) - G(b) without cancellation when both points share a tail.
  double cdf_difference(double a, double b) const noexcept {
    const double za = (a - mu) / lambda, zb = (b - mu) / lambda;
    if (za <= 0.0 && zb <= 0.0) return -0.5 * std::exp(za) * std::expm1(zb - za);
    if (za >= 0.0 && zb >= 0.0) return -0.5 * std::exp(-zb) * std::expm1(zb - za);
    return cdf(a) - cdf(b);
  }
  double integrated_cdf(double a) const noexcept {
    const double z = (a - mu) / lambda;
    return z <= 0.0 ? 0.5 * lambda * std::exp(z) : (a - mu) + 0.5 * lambda * std::exp(-z);
  }
  double upper_partial_moment(double a) const noexcept {
    const double z = (a - mu) / lambda;
    return z >= 0.0 ? 0.5 * lambda * std::exp(-z) : 0.5 * lambda * std::exp(z) - (a - mu);
  }
  double quantile(double p) const noexcept {
    return p <= 0.5 ? mu + lambda * std::log(2.0 * p) : mu - lambda * std::log(2.0 * (1.0 - p));
  }
  double upper_quantile(double q) const noexcept {
    return q <= 0.5 ? mu - lambda * std::log(2.0 * q) : mu + lambda * std::log(2.0 * (1.0 - q));
  }
  double mean() const noexcept { return mu; }
  double median() const noexcept { return mu; }
  double stdev() const noexcept { return std::numbers::sqrt2 * lambda; }
  std::vector<double> kinks() const { return {mu}; }
};

/// G(a) = 1 / (1 + exp(-(a - mu) / s)).
struct Logistic {
  double mu;
  double s;

  double log_density(double a) const noexcept {
    const double z = std::abs((a - mu) / s);
    return -z - 2.0 * std::log1p(std::exp(-z)) - std::log(s);
  }
  double log_density_derivative(double a, Side) const noexcept {
    return -std::tanh(0.5 * (a - mu) / s) / s;
  }
  double cdf(double a) const noexcept {
    const double z = (a - mu) / s;
    if (z < 0.0) {
      const double e = std::exp(z);
      return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(-z));
  }
  double survival(double a) const noexcept { return Logistic{-mu, s}.cdf(-a); }
  double cdf_difference(double a, double b) const noexcept {
    const double za = (a - mu) / s, zb = (b - mu) / s;
    if (za <= 0.0 && zb <= 0.0) {
      const double ea = std::exp(za), eb = std::exp(zb);
      return -ea * std::expm1(zb - za) / ((1.0 + ea) * (1.0 + eb));
    }
    if (za >= 0.0 && zb >= 0.0) {
      const double ea = std::exp(-za), eb = std::exp(-zb);
      return -eb * std::expm1(zb - za) / ((1.0 + ea) * (1.0 + eb));
    }
    return cdf(a) - cdf(b);
  }
  static double softplus(double z) noexcept {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  }
  double integrated_cdf(double a) const noexcept { return s * softplus((a - mu) / s); }
  double upper_partial_moment(double a) const noexcept { return s * softplus(-(a - mu) / s); }
  double quantile(double p) const noexcept { return mu + s * std::log(p / (1.0 - p)); }
  double upper_quantile(double q) const noexcept { return mu + s * std::log((1.0 - q) / q); }
  double mean() const noexcept { return mu; }
  double median() const noexcept { return mu; }
  double stdev() const noexcept { return std::numbers::pi * s / std::numbers::sqrt3; }
  std::vector<double> kinks() const { return {}; }
};

struct Normal {
  double mu;
  double sigma;

  static double phi(double z) noexcept {
    return std::exp(-0.5 * z * z) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
  }
  static double Phi(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

  double log_density(double a) const noexcept {
    const double z = (a - mu) / sigma;
    return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
  double log_density_derivative(double a, Side) const noexcept {
    return -(a - mu) / (sigma * sigma);
  }
  double cdf(double a) const noexcept { return Phi((a - mu) / sigma); }
  double survival(double a) const noexcept { return Phi(-(a - mu) / sigma); }
  double cdf_difference(double a, double b) const noexcept {
    if (a >= mu && b >= mu) return survival(b) - survival(a);
    return cdf(a) - cdf(b);
  }
  double integrated_cdf(double a) const noexcept {
    const double z = (a - mu) / sigma;
    return sigma * (z * Phi(z) + phi(z));
  }
  double upper_partial_moment(double a) const noexcept {
    const double z = (a - mu) / sigma;
    return sigma * (phi(z) - z * Phi(-z));
  }
  double quantile(double p) const {
    if (p <= 0.0) return -detail::inf;
    if (p >= 1.0) return detail::inf;
    return mu - sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  }
  double upper_quantile(double q) const {
    if (q <= 0.0) return detail::inf;
    if (q >= 1.0) return -detail::inf;
    return mu + sigma * std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
  }
  double mean() const noexcept { return mu; }
  double median() const noexcept { return mu; }
  double stdev() const noexcept { return sigma; }
  std::vector<double> kinks() const { return {}; }
};

}  // namespace family

/// An independent background risk W with a strictly positive, piecewise
/// continuously differentiable density.
class BackgroundRisk {
 public:
  using Variant =
      std::variant<family::Laplace, family::Logistic, family::Normal, PiecewiseExpPoly>;

  static BackgroundRisk laplace(double mu, double lambda) {
    check(mu, lambda);
    return BackgroundRisk(family::Laplace{mu, lambda});
  }
  static BackgroundRisk logistic(double mu, double s) {
    check(mu, s);
    return BackgroundRisk(family::Logistic{mu, s});
  }
  static BackgroundRisk normal(double mu, double sigma) {
    check(mu, sigma);
    return BackgroundRisk(family::Normal{mu, sigma});
  }
  static BackgroundRisk piecewise(std::vector<double> knots, std::vector<LogQuadratic> pieces) {
    return BackgroundRisk(PiecewiseExpPoly(std::move(knots), std::move(pieces)));
  }
  /// Named family parameterised by mean and standard deviation.
  static BackgroundRisk with_stdev(Family f, double mu, double sigma) {
    switch (f) {
      case Family::laplace: return laplace(mu, sigma / std::numbers::sqrt2);
      case Family::logistic: return logistic(mu, sigma * std::numbers::sqrt3 / std::numbers::pi);
      case Family::normal: return normal(mu, sigma);
      case Family::piecewise: break;
    }
    throw error(errc::invalid_distribution, "piecewise densities have no stdev parameterisation");
  }

  Family family() const noexcept { return static_cast<Family>(impl_.index()); }
  const Variant& variant() const noexcept { return impl_; }

  double log_density(double a) const {
    return std::visit([a](const auto& d) { return d.log_density(a); }, impl_);
  }
  double density(double a) const { return std::exp(log_density(a)); }
  /// g'(a)/g(a); at kinks the one-sided limit from `side`.
  double log_density_derivative(double a, Side side = Side::right) const {
    return std::visit([=](const auto& d) { return d.log_density_derivative(a, side); }, impl_);
  }
  double cdf(double a) const {
    return std::visit([a](const auto& d) { return d.cdf(a); }, impl_);
  }
  double survival(double a) const {
    return std::visit([a](const auto& d) { return d.survival(a); }, impl_);
  }
  /// G(a) - G(b), computed from whichever tail keeps precision.
  double cdf_difference(double a, double b) const {
    return std::visit(
        [=](const auto& d) -> double {
          if constexpr (requires { d.cdf_difference(a, b); }) {
            return d.cdf_difference(a, b);
          } else {
            const double m = d.mean();
            if (a >= m && b >= m) return d.survival(b) - d.survival(a);
            return d.cdf(a) - d.cdf(b);
          }
        },
        impl_);
  }
  /// u_G(a) = integral of G over (-inf, a] = E[(a - W)^+].
  double integrated_cdf(double a) const {
    return std::visit([a](const auto& d) { return d.integrated_cdf(a); }, impl_);
  }
  /// E[(W - a)^+] = u_G(a) - (a - E[W]).
  double upper_partial_moment(double a) const {
    return std::visit([a](const auto& d) { return d.upper_partial_moment(a); }, impl_);
  }
  /// u_G(a) - u_G(b).
  double integrated_cdf_difference(double a, double b) const {
    const double m = mean();
    if (a >= m && b >= m) return (a - b) + upper_partial_moment(a) - upper_partial_moment(b);
    return integrated_cdf(a) - integrated_cdf(b);
  }
  double quantile(double p) const {
    return std::visit([p](const auto& d) { return d.quantile(p); }, impl_);
  }
  /// The point a with P(W > a) = q; accurate for q near zero.
  double upper_quantile(double q) const {
    return std::visit([q](const auto& d) { return d.upper_quantile(q); }, impl_);
  }
  double mean() const {
    return std::visit([](const auto& d) { return d.mean(); }, impl_);
  }
  double stdev() const {
    return std::visit([](const auto& d) { return d.stdev(); }, impl_);
  }
  /// Points where the density is not differentiable.
  std::vector<double> kinks() const {
    return std::visit(
        [](const auto& d) -> std::vector<double> {
          if constexpr (requires { d.kinks(); })
            return d.kinks();
          else
            return {d.knots().begin(), d.knots().end()};
        },
        impl_);
  }

  /// Distribution of W + c.
  BackgroundRisk shifted(double c) const {
    return std::visit(
        [c](const auto& d) -> BackgroundRisk {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PiecewiseExpPoly>)
            return BackgroundRisk(d.shifted(c));
          else {
            T copy = d;
            copy.mu += c;
            return BackgroundRisk(copy);
          }
        },
        impl_);
  }
  /// Distribution of t W, t > 0.
  BackgroundRisk scaled(double t) const {
    if (!(t > 0.0) || !std::isfinite(t)) throw error(errc::non_positive_scale);
    return std::visit(
        [t](const auto& d) -> BackgroundRisk {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, PiecewiseExpPoly>)
            return BackgroundRisk(d.scaled(t));
          else if constexpr (std::is_same_v<T, family::Laplace>)
            return BackgroundRisk(T{d.mu * t, d.lambda * t});
          else if constexpr (std::is_same_v<T, family::Logistic>)
            return BackgroundRisk(T{d.mu * t, d.s * t});
          else
            return BackgroundRisk(T{d.mu * t, d.sigma * t});
        },
        impl_);
  }

 private:
  template <class T>
  explicit BackgroundRisk(T d) : impl_(std::move(d)) {}

  static void check(double mu, double scale) {
    if (!std::isfinite(mu)) throw error(errc::invalid_distribution, "non-finite location");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw error(errc::invalid_distribution, "scale must be positive and finite");
  }

  Variant impl_;
};

// ---------------------------------------------------------------------------
// Size indices

namespace detail {

/// sup of the linear slope of q (or its absolute value) over a
/// segment [lo, hi] intersected with [from, inf).
inline double segment_slope_sup(const LogQuadratic& q, double lo, double hi, bool absolute) {
  auto val = [&](double a) -> double {
    if (std::isinf(a)) {
      if (q.c2 == 0.0) return absolute ? std::abs(q.c1) : q.c1;
      const double sign = (a < 0.0 ? -1.0 : 1.0) * (q.c2 > 0.0 ? 1.0 : -1.0);
      if (absolute) return inf;
      return sign > 0.0 ? inf : -inf;
    }
    const double v = q.slope(a);
    return absolute ? std::abs(v) : v;
  };
  return std::max(val(lo), val(hi));
}

inline double piecewise_slope_sup(const PiecewiseExpPoly& d, double from, bool absolute) {
  double best = -inf;
  for (std::size_t i = 0; i < d.segments(); ++i) {
    const double lo = std::max(d.lower_edge(i), from);
    const double hi = d.upper_edge(i);
    if (lo > hi) continue;
    best = std::max(best, segment_slope_sup(d.pieces()[i], lo, hi, absolute));
  }
  return best;
}

inline double reciprocal_size(double sup) {
  if (sup == inf) return 0.0;
  if (sup <= 0.0) return inf;
  return 1.0 / sup;
}

// Grid of 4097 points spanning quantiles 1e-9 .. 1 - 1e-9.
inline std::vector<double> size_grid(const BackgroundRisk& w) {
  constexpr int n = 4097;
  constexpr double edge = 1e-9;
  std::vector<double> a(n);
  for (int i = 0; i < n; ++i) {
    const double p = edge + (1.0 - 2.0 * edge) * i / (n - 1);
    a[i] = p <= 0.5 ? w.quantile(p) : w.upper_quantile(1.0 - p);
  }
  return a;
}

/// Grid-plus-refinement sup of f; returns {sup, argsup}.
template <class F>
std::pair<double, double> grid_sup(const std::vector<double>& grid, F&& f) {
  std::size_t best = 0;
  double best_val = -inf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  if (hi > lo) {
    const double x = golden_section_argmax(f, lo, hi);
    const double v = f(x);
    if (v > best_val) return {v, x};
  }
  return {best_val, grid[best]};
}

}  // namespace detail

struct SizeReport {
  double s_left;            ///< S(W) = (sup g'/g)^-1
  double s_two_sided;       ///< S*(W) = (sup |g'/g|)^-1
  double s_second_order;    ///< S2(W) = (sup g/G)^-1
  double argsup_left;       ///< -inf: supremum approached in the left tail
  double argsup_two_sided;
  double argsup_second_order;
};

/// Exponential size S(W) = (sup_a g'(a)/g(a))^-1; zero when the sup is infinite.
inline double exp_size(const BackgroundRisk& w) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, family::Laplace>) return d.lambda;
        else if constexpr (std::is_same_v<T, family::Logistic>) return d.s;
        else if constexpr (std::is_same_v<T, family::Normal>) return 0.0;
        else return detail::reciprocal_size(detail::piecewise_slope_sup(d, -detail::inf, false));
      },
      w.variant());
}

/// (sup_{a >= from} g'(a)/g(a))^-1; +inf when the density is nonincreasing there.
inline double exp_size_above(const BackgroundRisk& w, double from) {
  return std::visit(
      [from](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        double sup;
        if constexpr (std::is_same_v<T, family::Laplace>)
          sup = from < d.mu ? 1.0 / d.lambda : -1.0 / d.lambda;
        else if constexpr (std::is_same_v<T, family::Logistic>)
          sup = d.log_density_derivative(from, Side::right);  // decreasing in a
        else if constexpr (std::is_same_v<T, family::Normal>)
          sup = d.log_density_derivative(from, Side::right);  // log-concave
        else
          sup = detail::piecewise_slope_sup(d, from, false);
        return detail::reciprocal_size(sup);
      },
      w.variant());
}

/// Two-sided exponential size S*(W) = (sup_a |g'(a)/g(a)|)^-1.
inline double exp_size_two_sided(const BackgroundRisk& w) {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, family::Laplace>) return d.lambda;
        else if constexpr (std::is_same_v<T, family::Logistic>) return d.s;
        else if constexpr (std::is_same_v<T, family::Normal>) return 0.0;
        else return detail::reciprocal_size(detail::piecewise_slope_sup(d, -detail::inf, true));
      },
      w.variant());
}

namespace detail {
// sup g/G for a piecewise density: left-tail limit plus refined grid.
inline std::pair<double, double> piecewise_hazard_sup(const BackgroundRisk& w,
                                                      const PiecewiseExpPoly& d) {
  const auto& first = d.pieces().front();
  double tail = first.c2 < 0.0 ? inf : first.c1;  // g/G -> c1 for an exponential left tail
  if (tail == inf) return {inf, -inf};
  const auto grid = size_grid(w);
  auto ratio = [&](double a) { return std::exp(w.log_density(a) - std::log(w.cdf(a))); };
  auto [sup, arg] = grid_sup(grid, ratio);
  // An exponential left tail gives g/G == c1 exactly below the first knot.
  for (double k : d.knots()) {
    const double v = ratio(k);
    if (v > sup) sup = v, arg = k;
  }
  if (tail >= sup) return {tail, d.knots().empty() ? -inf : d.knots().front()};
  return {sup, arg};
}
}  // namespace detail

/// Second-order size S2(W) = (sup_a g(a)/G(a))^-1.
inline double exp_size_second_order(const BackgroundRisk& w) {
  return std::visit(
      [&w](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, family::Laplace>) return d.lambda;
        else if constexpr (std::is_same_v<T, family::Logistic>) return d.s;
        else if constexpr (std::is_same_v<T, family::Normal>) return 0.0;
        else return detail::reciprocal_size(detail::piecewise_hazard_sup(w, d).first);
      },
      w.variant());
}

inline SizeReport size_report(const BackgroundRisk& w) {
  SizeReport r{exp_size(w), exp_size_two_sided(w), exp_size_second_order(w),
               -detail::inf, -detail::inf, -detail::inf};
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, family::Laplace>) {
          r.argsup_left = r.argsup_two_sided = r.argsup_second_order = d.mu;
        } else if constexpr (std::is_same_v<T, PiecewiseExpPoly>) {
          // Locate the segment endpoint attaining each slope supremum.
          double best = -detail::inf, best_abs = -detail::inf;
          for (std::size_t i = 0; i < d.segments(); ++i) {
            const auto& q = d.pieces()[i];
            for (double a : {d.lower_edge(i), d.upper_edge(i)}) {
              const double v = detail::segment_slope_sup(q, a, a, false);
              const double va = detail::segment_slope_sup(q, a, a, true);
              if (v > best) best = v, r.argsup_left = a;
              if (va > best_abs) best_abs = va, r.argsup_two_sided = a;
            }
          }
          r.argsup_second_order = detail::piecewise_hazard_sup(w, d).second;
        }
      },
      w.variant());
  return r;
}

/// Whether a -> g(a) exp(-a/s) is nonincreasing, i.e. whether every gamble
/// with riskiness at most s is dominant to accept under W.
inline bool is_exactly_s_dominant_family(const BackgroundRisk& w, double s) {
  if (!(s > 0.0)) throw error(errc::invalid_argument, "s must be positive");
  return std::visit(
      [&](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PiecewiseExpPoly>) {
          // Tail slopes first: they are not visible on a finite grid.
          const auto& first = d.pieces().front();
          if (first.c2 < 0.0 || first.c1 > 1.0 / s) return false;
          auto grid = detail::size_grid(w);
          for (double k : d.knots()) grid.push_back(k);
          for (std::size_t i = 0; i < d.segments(); ++i) {
            const auto& q = d.pieces()[i];
            if (q.c2 != 0.0) {
              const double v = q.vertex();
              if (v > d.lower_edge(i) && v < d.upper_edge(i)) grid.push_back(v);
            }
          }
          std::sort(grid.begin(), grid.end());
          auto h = [&](double a) { return w.log_density(a) - a / s; };
          for (std::size_t i = 1; i < grid.size(); ++i) {
            const double prev = h(grid[i - 1]), cur = h(grid[i]);
            if (cur - prev > 1e-12 * std::max(1.0, std::abs(prev))) return false;
          }
          // Right endpoint slopes of each segment (one-sided limits at knots).
          for (double k : d.knots())
            if (d.log_density_derivative(k, Side::left) > (1.0 + 1e-12) / s ||
                d.log_density_derivative(k, Side::right) > (1.0 + 1e-12) / s)
              return false;
          return true;
        } else {
          const double size = exp_size(w);
          return size > 0.0 && s <= size * (1.0 + 1e-12);
        }
      },
      w.variant());
}

}  // namespace riskdom
