#pragma once

// Independent oracles for the analytic verifiers: Monte Carlo comparison of
// empirical CDFs, exact dominance checks on discretised backgrounds, and the
// small-negative-gamble rejection under limited liability.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "riskdom/background_risk.hpp"
#include "riskdom/cpt.hpp"
#include "riskdom/detail/numeric.hpp"
#include "riskdom/error.hpp"
#include "riskdom/gamble.hpp"

namespace riskdom {

struct OracleConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 42;
  std::size_t grid_points = 512;
  unsigned threads = 1;
  double sigmas = 4.0;  ///< refutation threshold in binomial standard errors

  void validate() const {
    if (samples < 10'000) throw error(errc::invalid_argument, "at least 10^4 samples required");
    if (grid_points == 0) throw error(errc::invalid_argument, "grid_points must be positive");
    if (!(sigmas > 0.0)) throw error(errc::invalid_argument, "sigmas must be positive");
  }
};

/// SplitMix64 evaluated in counter mode: draw i of a stream is
/// mix(seed + (i + 1) * golden_gamma), so any chunk can be generated
/// independently of the others.
class SplitMix64 {
 public:
  static constexpr std::uint64_t golden_gamma = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static constexpr std::uint64_t at(std::uint64_t seed, std::uint64_t counter) noexcept {
    return mix(seed + (counter + 1) * golden_gamma);
  }
  /// Uniform on the open interval (0, 1).
  static constexpr double unit(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }
};

enum class OracleVerdict { consistent_with_dominance, violation_found };

constexpr std::string_view to_string(OracleVerdict v) noexcept {
  return v == OracleVerdict::consistent_with_dominance ? "ConsistentWithDominance"
                                                       : "ViolationFound";
}

struct OracleReport {
  OracleVerdict verdict = OracleVerdict::consistent_with_dominance;
  /// Smallest standardised margin (F_W - F_{W+X}) / se over the grid.
  double worst_z = detail::inf;
  /// Empirical F_W(a) - F_{W+X}(a) at the witness.
  double worst_margin = detail::inf;
  double witness_a = detail::nan;
  std::uint64_t samples = 0;
  std::size_t grid_points = 0;
};

namespace detail {

inline double sample_background(const BackgroundRisk& w, double u) {
  return u <= 0.5 ? w.quantile(u) : w.upper_quantile(1.0 - u);
}

inline double sample_gamble(const Gamble& x, const std::vector<double>& cumulative, double v) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), v);
  const auto idx = std::min<std::size_t>(it - cumulative.begin(), x.size() - 1);
  return x.outcomes()[idx].value;
}

}  // namespace detail

/// Samples W by inversion and X independently, forms W + X from the same W
/// draw, and compares the empirical CDFs at quantiles of W. A violation is
/// reported only where F_{W+X} - F_W exceeds `sigmas` binomial standard errors
/// (computed as if the two samples were independent, which overstates the
/// error of the paired difference). Counts are integers accumulated over
/// fixed-size chunks, so the result does not depend on the thread count.
inline OracleReport mc_fosd_oracle(const Gamble& x, const BackgroundRisk& w,
                                   const OracleConfig& cfg = {}) {
  cfg.validate();
  const std::size_t k = cfg.grid_points;
  std::vector<double> grid(k);
  for (std::size_t i = 0; i < k; ++i)
    grid[i] = detail::sample_background(w, (static_cast<double>(i) + 0.5) / static_cast<double>(k));

  std::vector<double> cumulative;
  detail::compensated_sum c;
  for (const auto& o : x.outcomes()) cumulative.push_back((c += o.probability).value());

  constexpr std::uint64_t chunk = 1 << 16;
  const std::uint64_t n = cfg.samples;
  const std::uint64_t chunks = (n + chunk - 1) / chunk;

  auto run_chunks = [&](std::uint64_t first, std::uint64_t stride,
                        std::vector<std::uint64_t>& below_w, std::vector<std::uint64_t>& below_z) {
    std::vector<double> ws, zs;
    for (std::uint64_t ci = first; ci < chunks; ci += stride) {
      const std::uint64_t begin = ci * chunk, end = std::min(n, begin + chunk);
      ws.clear();
      zs.clear();
      for (std::uint64_t i = begin; i < end; ++i) {
        const double wi =
            detail::sample_background(w, SplitMix64::unit(SplitMix64::at(cfg.seed, 2 * i)));
        const double xi = detail::sample_gamble(
            x, cumulative, SplitMix64::unit(SplitMix64::at(cfg.seed, 2 * i + 1)));
        ws.push_back(wi);
        zs.push_back(wi + xi);
      }
      std::sort(ws.begin(), ws.end());
      std::sort(zs.begin(), zs.end());
      for (std::size_t g = 0; g < k; ++g) {
        below_w[g] += std::upper_bound(ws.begin(), ws.end(), grid[g]) - ws.begin();
        below_z[g] += std::upper_bound(zs.begin(), zs.end(), grid[g]) - zs.begin();
      }
    }
  };

  const unsigned threads = std::max(1u, cfg.threads);
  std::vector<std::vector<std::uint64_t>> bw(threads, std::vector<std::uint64_t>(k)),
      bz(threads, std::vector<std::uint64_t>(k));
  if (threads == 1) {
    run_chunks(0, 1, bw[0], bz[0]);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] { run_chunks(t, threads, bw[t], bz[t]); });
  }

  OracleReport r;
  r.samples = n;
  r.grid_points = k;
  const double dn = static_cast<double>(n);
  for (std::size_t g = 0; g < k; ++g) {
    std::uint64_t cw = 0, cz = 0;
    for (unsigned t = 0; t < threads; ++t) {
      cw += bw[t][g];
      cz += bz[t][g];
    }
    const double pw = static_cast<double>(cw) / dn, pz = static_cast<double>(cz) / dn;
    const double margin = pw - pz;
    const double se = std::sqrt((pw * (1.0 - pw) + pz * (1.0 - pz)) / dn);
    const double z = se > 0.0 ? margin / se : (margin < 0.0 ? -detail::inf : detail::inf);
    if (z < r.worst_z) {
      r.worst_z = z;
      r.worst_margin = margin;
      r.witness_a = grid[g];
    }
  }
  r.verdict = r.worst_z < -cfg.sigmas ? OracleVerdict::violation_found
                                      : OracleVerdict::consistent_with_dominance;
  return r;
}

struct BruteForceReport {
  bool dominant = false;
  double worst_margin = detail::inf;  ///< min over support of F_W - F_{W+X}
  double witness_a = detail::nan;
};

/// Exact dominance check for a finite W: both CDFs are step functions that
/// only jump on the union of supports, so comparing them there is exhaustive.
/// A discretised W has a lowest atom, below which any downside of X is
/// exposed; `tolerance` lets callers absorb that discretisation artefact.
inline BruteForceReport brute_force_fosd_detail(const Gamble& x, const DiscretizedLottery& w,
                                                double tolerance = 0.0) {
  const auto z = convolve(w, x);
  const auto wv = w.values(), wp = w.probabilities();
  const auto zv = z.values(), zp = z.probabilities();
  BruteForceReport r;
  detail::compensated_sum fw, fz;
  std::size_t iw = 0, iz = 0;
  while (iw < wv.size() || iz < zv.size()) {
    const double a = iz == zv.size() ? wv[iw]
                     : iw == wv.size() ? zv[iz]
                                       : std::min(wv[iw], zv[iz]);
    while (iw < wv.size() && wv[iw] == a) fw += wp[iw++];
    while (iz < zv.size() && zv[iz] == a) fz += zp[iz++];
    const double margin = fw.value() - fz.value();
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.witness_a = a;
    }
  }
  r.dominant = r.worst_margin >= -tolerance;
  return r;
}

inline bool brute_force_fosd(const Gamble& x, const DiscretizedLottery& w, double tolerance = 0.0) {
  return brute_force_fosd_detail(x, w, tolerance).dominant;
}

struct RejectionPoint {
  double t;
  double difference;  ///< E[u((W + tX)_l)] - E[u(W_l)]
};

struct RejectionResult {
  double t_bar;
  std::vector<RejectionPoint> sweep;  ///< t = 1, 1/2, ..., 2^-20
};

namespace detail {

// Finite-interval quadrature, mapped onto [0, 1]: on very short intervals the
// adaptive rule otherwise keeps bisecting against an absolute error floor.
template <class F>
double integrate(F&& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  const double width = b - a;
  auto g = [&](double u) { return f(a + u * width); };
  return width * gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, 1e-13);
}

/// Integral of f * g over [from, inf), split at the kinks and the mean of W.
template <class F>
double integrate_upper(const BackgroundRisk& w, F&& f, double from) {
  std::vector<double> cuts{from};
  for (double k : w.kinks())
    if (k > from) cuts.push_back(k);
  if (w.mean() > from) cuts.push_back(w.mean());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  auto fg = [&](double a) {
    const double d = w.density(a);
    return d > 0.0 ? f(a) * d : 0.0;
  };
  compensated_sum s;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) s += integrate(fg, cuts[i], cuts[i + 1]);
  s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fg, cuts.back(), inf, 15,
                                                                     1e-13);
  return s.value();
}

}  // namespace detail

/// Expected-utility change from adding tX under limited liability at `ell`,
/// with u(a) = 1 - exp(-a / u_scale). Splitting the range at ell and
/// ell - t x_j, the part above both points is (1 - E[e^{-tX/c}]) times
/// B = int_{ell}^inf e^{-w/c} g(w) dw; what remains are O(t^2) strips of
/// width t|x_j| next to ell, integrated directly.
inline double truncated_utility_difference(const Gamble& x, const BackgroundRisk& w, double ell,
                                           double u_scale, double t) {
  const double c = u_scale;
  const double head = std::exp(-ell / c);
  // e^{-w/c} = head * e^{-(w - ell)/c}
  const double b = head * detail::integrate_upper(
                              w, [&](double a) { return std::exp(-(a - ell) / c); }, ell);
  detail::compensated_sum total;
  total += -std::expm1(log_moment(x, t / c)) * b;
  // Both strips are integrated in the offset from their lower end, so the
  // utility argument is formed without cancellation even for tiny t.
  for (const auto& o : x.outcomes()) {
    const double shift = t * o.value;
    if (shift > 0.0) {
      // w in [ell - shift, ell): wealth rises from ell to w + shift.
      total += o.probability *
               detail::integrate(
                   [&](double s) { return -head * std::expm1(-s / c) * w.density(ell - shift + s); },
                   0.0, shift);
    } else if (shift < 0.0) {
      // w in [ell, ell - shift): the floor binds; undo the untruncated loss.
      total += o.probability *
               detail::integrate(
                   [&](double s) { return head * std::expm1((-shift - s) / c) * w.density(ell + s); },
                   0.0, -shift);
    }
  }
  return total.value();
}

/// Largest t on {1, 1/2, ..., 2^-20} such that the truncated expected-utility
/// difference is strictly negative at t and at every smaller grid point.
inline RejectionResult small_negative_gamble_rejection(const Gamble& x, const BackgroundRisk& w,
                                                       double ell, double u_scale) {
  if (!(mean(x) < 0.0))
    throw error(errc::precondition_violated, "gamble must have strictly negative mean");
  if (!(u_scale > 0.0) || !std::isfinite(u_scale)) throw error(errc::non_positive_scale);
  if (!std::isfinite(ell)) throw error(errc::invalid_argument, "ell must be finite");
  if (!(w.survival(ell) >= 1e-15))
    throw error(errc::precondition_violated, "background risk lies below ell with certainty");

  RejectionResult r{detail::nan, {}};
  for (int k = 0; k <= 20; ++k) {
    const double t = std::ldexp(1.0, -k);
    r.sweep.push_back({t, truncated_utility_difference(x, w, ell, u_scale, t)});
  }
  std::size_t first = r.sweep.size();
  while (first > 0 && r.sweep[first - 1].difference < 0.0) --first;
  if (first == r.sweep.size())
    throw error(errc::numerical_failure, "no rejection found down to t = 2^-20");
  r.t_bar = r.sweep[first].t;
  return r;
}

}  // namespace riskdom
