#pragma once

// First- and second-order stochastic dominance of W + X over W.
//
// Accepting X is FOSD-dominant iff Delta(a) = G(a) - E[G(a - X)] >= 0 for all
// a, and SOSD-dominant iff u_G(a) - E[u_G(a - X)] >= 0 with u_G the
// integrated cdf. The verifiers evaluate these margins on a quantile grid of
// W extended by the gamble's support bound M. Outside that window both
// G(a) and E[G(a - X)] lie within 1e-12 of the same tail value, so the
// margin cannot fall below the -1e-12 tolerance there.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "riskdom/background_risk.hpp"
#include "riskdom/detail/grid.hpp"
#include "riskdom/error.hpp"
#include "riskdom/gamble.hpp"

namespace riskdom {

inline constexpr double margin_tolerance = 1e-12;

enum class Verdict { dominant, not_dominant, sufficient_condition_met, inconclusive };
enum class Method { theorem_bound, grid_verification };

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::dominant: return "Dominant";
    case Verdict::not_dominant: return "NotDominant";
    case Verdict::sufficient_condition_met: return "SufficientConditionMet";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "?";
}
constexpr std::string_view to_string(Method m) noexcept {
  return m == Method::theorem_bound ? "TheoremBound" : "GridVerification";
}

struct GridMeta {
  std::size_t points = 0;
  int refinement_passes = 0;
};

struct DominanceReport {
  Verdict verdict = Verdict::inconclusive;
  /// Grid minimum of the margin; for closed-form checks, the slack size - R(X).
  double worst_margin = detail::nan;
  /// Where the margin minimum was attained (NaN for closed-form checks).
  double witness_a = detail::nan;
  Method method = Method::grid_verification;
  GridMeta grid;
  /// Whether the closed-form sufficient condition (R(X) <= size) holds.
  bool sufficient_condition = false;
  /// Leading coefficient 1 - E[exp(-X/scale)] of Delta as a -> -inf, for
  /// Laplace and Logistic backgrounds.
  std::optional<double> tail_coefficient;
};

namespace detail {

inline std::vector<double> outcome_values(const Gamble& x) {
  std::vector<double> v;
  for (const auto& o : x.outcomes()) v.push_back(o.value);
  return v;
}

inline std::optional<double> exponential_tail_coefficient(const Gamble& x,
                                                          const BackgroundRisk& w) {
  double scale;
  if (const auto* l = std::get_if<family::Laplace>(&w.variant()))
    scale = l->lambda;
  else if (const auto* s = std::get_if<family::Logistic>(&w.variant()))
    scale = s->s;
  else
    return std::nullopt;
  return -std::expm1(log_moment(x, 1.0 / scale));
}

/// Sufficient-condition slack; throws for gambles outside the riskiness domain.
inline double riskiness_slack(const Gamble& x, double size) {
  return size - riskiness(x).riskiness;
}

inline DominanceReport grid_report(const GridScan& scan, double tolerance = margin_tolerance) {
  DominanceReport r;
  r.method = Method::grid_verification;
  r.worst_margin = scan.min_margin;
  r.witness_a = scan.argmin;
  r.grid = {scan.points, scan.passes};
  r.verdict = scan.min_margin >= -tolerance ? Verdict::dominant : Verdict::not_dominant;
  return r;
}

/// A negative leading tail coefficient means the margin is negative for all
/// sufficiently small a, however small its magnitude on the grid.
template <class F>
void close_left_tail(DominanceReport& r, const GridScan& scan, F&& margin) {
  if (!r.tail_coefficient || *r.tail_coefficient >= -margin_tolerance) return;
  if (r.verdict != Verdict::dominant) return;
  r.verdict = Verdict::not_dominant;
  r.witness_a = scan.lowest_point;
  r.worst_margin = margin(scan.lowest_point);
}

inline bool has_riskiness(const Gamble& x) { return mean(x) > 0.0 && x.min() < 0.0; }

}  // namespace detail

/// FOSD margin G(a) - E[G(a - X)].
inline double fosd_margin(const Gamble& x, const BackgroundRisk& w, double a) {
  detail::compensated_sum s;
  for (const auto& o : x.outcomes()) s += o.probability * w.cdf_difference(a, a - o.value);
  return s.value();
}

/// SOSD margin u_G(a) - E[u_G(a - X)].
inline double sosd_margin(const Gamble& x, const BackgroundRisk& w, double a) {
  detail::compensated_sum s;
  for (const auto& o : x.outcomes())
    s += o.probability * w.integrated_cdf_difference(a, a - o.value);
  return s.value();
}

/// Closed-form check R(X) <= S(W). Never reports non-dominance: a failed
/// bound yields Inconclusive.
inline DominanceReport fosd_theorem_check(const Gamble& x, const BackgroundRisk& w) {
  if (mean(x) <= 0.0) throw error(errc::non_positive_mean);
  DominanceReport r;
  r.method = Method::theorem_bound;
  if (x.min() >= 0.0) {
    // No downside: W + X >= W pointwise.
    r.sufficient_condition = true;
    r.worst_margin = detail::inf;
  } else {
    r.worst_margin = detail::riskiness_slack(x, exp_size(w));
    r.sufficient_condition = exp_size(w) > 0.0 && r.worst_margin >= 0.0;
  }
  r.verdict = r.sufficient_condition ? Verdict::sufficient_condition_met : Verdict::inconclusive;
  return r;
}

/// Grid verification of E[G(a - X)] <= G(a) for all a.
inline DominanceReport fosd_verify(const Gamble& x, const BackgroundRisk& w,
                                   const detail::GridOptions& opt = {}) {
  const auto offsets = detail::outcome_values(x);
  auto grid = detail::margin_grid(w, offsets, x.support_bound(), std::nullopt, opt);
  auto margin = [&](double a) { return fosd_margin(x, w, a); };
  auto scan = detail::scan_margin(std::move(grid), margin, opt);
  auto r = detail::grid_report(scan);
  r.tail_coefficient = detail::exponential_tail_coefficient(x, w);
  detail::close_left_tail(r, scan, margin);
  // FOSD forces E[W + X] >= E[W]; every named family has a finite mean.
  if (mean(x) <= 0.0) r.verdict = Verdict::not_dominant;
  if (detail::has_riskiness(x))
    r.sufficient_condition = exp_size(w) > 0.0 && detail::riskiness_slack(x, exp_size(w)) >= 0.0;
  else
    r.sufficient_condition = mean(x) > 0.0;
  return r;
}

/// Closed-form bound first, grid verification when the bound does not apply.
inline DominanceReport fosd_check(const Gamble& x, const BackgroundRisk& w) {
  if (mean(x) > 0.0) {
    auto r = fosd_theorem_check(x, w);
    if (r.verdict == Verdict::sufficient_condition_met) return r;
  }
  return fosd_verify(x, w);
}

/// Limited liability at `ell`: (W + X)_ell must dominate W_ell, which only
/// constrains the margin for a >= ell. The sufficient condition compares
/// R(X) with the size of W restricted to a >= ell - max[X].
inline DominanceReport fosd_verify_limited_liability(const Gamble& x, const BackgroundRisk& w,
                                                     double ell,
                                                     const detail::GridOptions& opt = {}) {
  const auto offsets = detail::outcome_values(x);
  auto grid = detail::margin_grid(w, offsets, x.support_bound(), ell, opt);
  auto scan = detail::scan_margin(
      std::move(grid), [&](double a) { return fosd_margin(x, w, a); }, opt);
  auto r = detail::grid_report(scan);
  r.tail_coefficient = detail::exponential_tail_coefficient(x, w);
  if (detail::has_riskiness(x)) {
    const double size = exp_size_above(w, ell - x.max());
    r.sufficient_condition = size > 0.0 && detail::riskiness_slack(x, size) >= 0.0;
  } else {
    r.sufficient_condition = x.min() >= 0.0;
  }
  return r;
}

/// The SOSD margin is a difference of dollar amounts of order M + sd(W), so
/// the absolute tolerance is scaled accordingly.
inline double sosd_tolerance(const Gamble& x, const BackgroundRisk& w) {
  return margin_tolerance * std::max(1.0, x.support_bound() + w.stdev());
}

/// Second-order dominance: sufficient condition R(X) <= S2(W), verified on
/// the grid through the integrated-cdf margin.
inline DominanceReport sosd_verify(const Gamble& x, const BackgroundRisk& w,
                                   const detail::GridOptions& opt = {}) {
  if (mean(x) <= 0.0) throw error(errc::non_positive_mean);
  if (x.min() >= 0.0) throw error(errc::no_downside);
  if (!std::isfinite(w.mean())) throw error(errc::infinite_mean);
  const auto offsets = detail::outcome_values(x);
  auto grid = detail::margin_grid(w, offsets, x.support_bound(), std::nullopt, opt);
  auto margin = [&](double a) { return sosd_margin(x, w, a); };
  auto scan = detail::scan_margin(std::move(grid), margin, opt);
  auto r = detail::grid_report(scan, sosd_tolerance(x, w));
  r.tail_coefficient = detail::exponential_tail_coefficient(x, w);
  detail::close_left_tail(r, scan, margin);
  const double s2 = exp_size_second_order(w);
  r.sufficient_condition = s2 > 0.0 && detail::riskiness_slack(x, s2) >= 0.0;
  return r;
}

}  // namespace riskdom
