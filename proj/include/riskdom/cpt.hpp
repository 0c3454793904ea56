#pragma once

// Cumulative prospect theory evaluation of discretised wealth lotteries.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "riskdom/background_risk.hpp"
#include "riskdom/detail/numeric.hpp"
#include "riskdom/error.hpp"
#include "riskdom/gamble.hpp"
#include "riskdom/thresholds.hpp"

namespace riskdom {

struct CptParams {
  double gamma = 0.61;          ///< gain weighting curvature
  double delta = 0.69;          ///< loss weighting curvature
  double loss_aversion = 2.25;  ///< lambda
  double rho = 0.88;            ///< value-function exponent

  void validate() const {
    for (double v : {gamma, delta, loss_aversion, rho})
      if (!(v > 0.0) || !std::isfinite(v))
        throw error(errc::invalid_argument, "CPT parameters must be positive");
  }
};

/// p^c / (p^c + (1-p)^c)^(1/c).
inline double probability_weight(double p, double c) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double lp = c * std::log(p), lq = c * std::log1p(-p);
  const double m = std::max(lp, lq);
  const double log_den = m + std::log(std::exp(lp - m) + std::exp(lq - m));
  return std::exp(lp - log_den / c);
}

inline double weight_gain(double p, const CptParams& params) {
  return probability_weight(p, params.gamma);
}
inline double weight_loss(double p, const CptParams& params) {
  return probability_weight(p, params.delta);
}

inline double cpt_value_function(double x, const CptParams& params) {
  if (x >= 0.0) return std::pow(x, params.rho);
  return -params.loss_aversion * std::pow(-x, params.rho);
}

/// A finite lottery with support sorted ascending.
class DiscretizedLottery {
 public:
  DiscretizedLottery(std::vector<double> values, std::vector<double> probabilities)
      : values_(std::move(values)), probs_(std::move(probabilities)) {
    if (values_.empty() || values_.size() != probs_.size())
      throw error(errc::invalid_argument, "lottery values and probabilities mismatch");
    detail::compensated_sum total;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || !(probs_[i] >= 0.0))
        throw error(errc::invalid_argument, "invalid lottery point");
      if (i > 0 && !(values_[i] > values_[i - 1]))
        throw error(errc::invalid_argument, "lottery support must be strictly increasing");
      total += probs_[i];
    }
    if (std::abs(total.value() - 1.0) > 1e-12)
      throw error(errc::invalid_argument, "lottery probabilities do not sum to 1");
  }

  /// Sorts and merges equal values.
  static DiscretizedLottery from_points(std::vector<std::pair<double, double>> pts) {
    std::sort(pts.begin(), pts.end());
    std::vector<double> v, p;
    v.reserve(pts.size());
    p.reserve(pts.size());
    for (const auto& [x, q] : pts) {
      if (!v.empty() && v.back() == x)
        p.back() += q;
      else {
        v.push_back(x);
        p.push_back(q);
      }
    }
    return {std::move(v), std::move(p)};
  }

  static DiscretizedLottery point_mass(double x) { return {{x}, {1.0}}; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> probabilities() const noexcept { return probs_; }
  std::size_t size() const noexcept { return values_.size(); }
  double max_mass() const noexcept { return *std::max_element(probs_.begin(), probs_.end()); }

  DiscretizedLottery scaled(double t) const {
    std::vector<double> v = values_;
    for (auto& x : v) x *= t;
    return {std::move(v), probs_};
  }

 private:
  std::vector<double> values_;
  std::vector<double> probs_;
};

enum class Spacing {
  uniform,  ///< equal-mass cells
  graded,   ///< cells refined towards both tails
};

namespace detail {
// Smootherstep: symmetric, with T(u) ~ 10 u^3 near zero.
inline double graded_map(double u) { return u * u * u * (10.0 + u * (-15.0 + 6.0 * u)); }
}  // namespace detail

/// Quantile-midpoint discretisation of W into n cells partitioning [0, 1] in
/// probability. Each cell carries its exact mass and sits at the quantile of
/// its midpoint, clamped to [p_min, 1 - p_min]. Graded spacing maps equal
/// steps in u through a smootherstep so that cells shrink like u^3 at the
/// ends, where rank-dependent weights are singular.
inline DiscretizedLottery discretize(const BackgroundRisk& w, std::size_t n,
                                     Spacing spacing = Spacing::graded, double p_min = 1e-12) {
  if (n < 2) throw error(errc::invalid_argument, "need at least two discretisation points");
  auto cell_edge = [&](std::size_t k) {
    const double u = static_cast<double>(k) / static_cast<double>(n);
    return spacing == Spacing::graded ? detail::graded_map(u) : u;
  };
  std::vector<std::pair<double, double>> pts;
  pts.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Lower and upper halves are built from their own tail for precision.
    const bool lower = 2 * k + 1 <= n;
    const double mass = lower ? cell_edge(k + 1) - cell_edge(k)
                              : cell_edge(n - k) - cell_edge(n - k - 1);
    const double umid = (static_cast<double>(lower ? k : n - 1 - k) + 0.5) / static_cast<double>(n);
    double p = spacing == Spacing::graded ? detail::graded_map(umid) : umid;
    p = std::clamp(p, p_min, 0.5);
    const double a = lower ? w.quantile(p) : w.upper_quantile(p);
    pts.emplace_back(a, mass);
  }
  detail::compensated_sum total;
  for (const auto& pt : pts) total += pt.second;
  for (auto& pt : pts) pt.second /= total.value();
  return DiscretizedLottery::from_points(std::move(pts));
}

/// Distribution of Z + X for independent Z (discrete) and gamble X.
inline DiscretizedLottery convolve(const DiscretizedLottery& z, const Gamble& x) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(z.size() * x.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    for (const auto& o : x.outcomes())
      pts.emplace_back(z.values()[i] + o.value, z.probabilities()[i] * o.probability);
  return DiscretizedLottery::from_points(std::move(pts));
}

/// Rank-dependent value with reference point 0: losses weighted through
/// w-(F) cumulated from the left, gains through w+(1 - F) cumulated from the
/// right.
inline double cpt_value(const DiscretizedLottery& z, const CptParams& params = {}) {
  const auto v = z.values();
  const auto p = z.probabilities();
  detail::compensated_sum total;

  detail::compensated_sum cum;
  double w_prev = 0.0;
  for (std::size_t i = 0; i < v.size() && v[i] < 0.0; ++i) {
    cum += p[i];
    const double w_cur = weight_loss(std::min(1.0, cum.value()), params);
    total += cpt_value_function(v[i], params) * (w_cur - w_prev);
    w_prev = w_cur;
  }

  detail::compensated_sum decum;
  w_prev = 0.0;
  for (std::size_t i = v.size(); i-- > 0 && v[i] > 0.0;) {
    decum += p[i];
    const double w_cur = weight_gain(std::min(1.0, decum.value()), params);
    total += cpt_value_function(v[i], params) * (w_cur - w_prev);
    w_prev = w_cur;
  }
  return total.value();
}

/// Accept X at background lottery W iff V(W + X) >= V(W).
inline bool cpt_accepts(const Gamble& x, const DiscretizedLottery& w, const CptParams& params = {}) {
  return cpt_value(convolve(w, x), params) >= cpt_value(w, params);
}

/// W is recentred to mean zero and discretised with n_points graded cells.
inline bool cpt_accepts(const Gamble& x, const BackgroundRisk& w, const CptParams& params = {},
                        std::size_t n_points = 20000) {
  params.validate();
  if (n_points < 1000) throw error(errc::invalid_argument, "n_points must be at least 1000");
  return cpt_accepts(x, discretize(w.shifted(-w.mean()), n_points), params);
}

struct CptThreshold {
  double sigma;
  double rejected_below;  ///< largest sigma seen rejected
  int evaluations;
};

/// Minimal standard deviation of a mean-zero background risk of the given
/// family at which the CPT decision maker accepts X. Acceptance is checked to
/// be monotone on the final bracket and on the scan points above it.
inline CptThreshold cpt_sigma_threshold_detail(const Gamble& x, Family fam,
                                               const CptParams& params = {},
                                               std::size_t n_points = 20000,
                                               double rel_tol = 1e-7) {
  params.validate();
  if (n_points < 1000) throw error(errc::invalid_argument, "n_points must be at least 1000");
  const auto unit = discretize(BackgroundRisk::with_stdev(fam, 0.0, 1.0), n_points);
  int evaluations = 0;
  auto accepts = [&](double sigma) {
    ++evaluations;
    return cpt_accepts(x, unit.scaled(sigma), params);
  };

  constexpr double sigma_max = 1e7;
  const double step = std::pow(2.0, 0.25);
  double lo = 0.05 * x.support_bound();
  double hi = lo;
  if (accepts(lo)) {
    for (int i = 0; i < 200 && accepts(lo); ++i) {
      hi = lo;
      lo /= 2.0;
      if (lo < 1e-12 * x.support_bound()) return {0.0, 0.0, evaluations};
    }
  } else {
    while (true) {
      lo = hi;
      hi = lo * step;
      if (hi > sigma_max) throw error(errc::no_acceptance_found, "no sigma up to 1e7 accepts");
      if (accepts(hi)) break;
    }
  }

  constexpr int probes = 16;
  bool seen_accept = false;
  for (int k = 1; k < probes; ++k) {
    const bool a = accepts(lo + (hi - lo) * k / probes);
    if (seen_accept && !a)
      throw error(errc::numerical_failure, "CPT acceptance is not monotone in sigma");
    seen_accept = seen_accept || a;
  }
  for (int k = 1; k <= 4; ++k)
    if (!accepts(hi * std::pow(step, k)))
      throw error(errc::numerical_failure, "CPT acceptance is not monotone in sigma");

  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (accepts(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {hi, lo, evaluations};
}

inline double cpt_sigma_threshold(const Gamble& x, Family fam, const CptParams& params = {},
                                  std::size_t n_points = 20000) {
  return cpt_sigma_threshold_detail(x, fam, params, n_points).sigma;
}

struct CptTableRow {
  std::string label;
  double gain;
  double loss;
  double sigma_laplace;
  double sigma_logistic;
  double sigma_normal;
};

/// CPT acceptance thresholds for the five standard fifty-fifty gambles.
inline std::vector<CptTableRow> table2(const CptParams& params = {}, std::size_t n_points = 20000) {
  std::vector<CptTableRow> rows;
  for (const auto& [gain, loss] : table_gambles) {
    const auto x = Gamble::fifty_fifty(gain, loss);
    rows.push_back({gamble_label(gain, loss), gain, loss,
                    cpt_sigma_threshold(x, Family::laplace, params, n_points),
                    cpt_sigma_threshold(x, Family::logistic, params, n_points),
                    cpt_sigma_threshold(x, Family::normal, params, n_points)});
  }
  return rows;
}

}  // namespace riskdom
