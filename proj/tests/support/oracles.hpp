#pragma once

// Reference computations written independently of the library code paths:
// scans instead of bisection, quadrature instead of closed forms, literal
// loops instead of merged sweeps.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "riskdom/riskdom.hpp"

namespace oracle {

using riskdom::BackgroundRisk;
using riskdom::Gamble;
using riskdom::Outcome;

/// E[exp(-alpha X)] - 1 in long double, no overflow guard beyond the type's range.
inline long double moment_minus_one(const Gamble& g, long double alpha) {
  long double s = 0.0L;
  for (const auto& o : g.outcomes())
    s += static_cast<long double>(o.probability) * std::exp(-alpha * static_cast<long double>(o.value));
  return s - 1.0L;
}

/// Riskiness by scanning alpha on a fine geometric grid for the sign change
/// of E[e^{-alpha X}] - 1, then Illinois regula falsi in long double.
inline double riskiness_by_scan(const Gamble& g) {
  const long double m = g.support_bound();
  long double a0 = 1e-9L / m, a1 = a0;
  // The moment dips below 1 just above 0 and crosses back exactly once.
  while (moment_minus_one(g, a1) <= 0.0L) {
    a0 = a1;
    a1 *= 1.001L;
  }
  long double f0 = moment_minus_one(g, a0), f1 = moment_minus_one(g, a1);
  int side = 0;
  for (int i = 0; i < 200 && a1 - a0 > 1e-17L * a1; ++i) {
    const long double a = (a0 * f1 - a1 * f0) / (f1 - f0);
    const long double f = moment_minus_one(g, a);
    if (f <= 0.0L) {
      a0 = a;
      f0 = f;
      if (side == -1) f1 /= 2;
      side = -1;
    } else {
      a1 = a;
      f1 = f;
      if (side == 1) f0 /= 2;
      side = 1;
    }
  }
  return static_cast<double>(1.0L / (0.5L * (a0 + a1)));
}

/// u_G(a) = E[(a - W)^+] by adaptive quadrature against the density.
inline double integrated_cdf_quad(const BackgroundRisk& w, double a) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double t) { return (a - t) * w.density(t); };
  double total = 0.0;
  std::vector<double> cuts{a};
  for (double k : w.kinks())
    if (k < a) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  total += gauss_kronrod<double, 61>::integrate(f, -std::numeric_limits<double>::infinity(),
                                                 cuts.front(), 20, 1e-14);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 20, 1e-14);
  return total;
}

/// sup of g'/g (sign = +1) or |g'/g| (sign = 0) over a dense quantile grid
/// plus points hugging each kink, using central differences of the log
/// density with steps that never straddle a kink.
inline double sup_log_slope_fd(const BackgroundRisk& w, int sign, int n = 20001) {
  const auto kinks = w.kinks();
  std::vector<double> points;
  for (int i = 0; i < n; ++i) points.push_back(w.quantile(1e-9 + (1.0 - 2e-9) * i / (n - 1)));
  for (double k : kinks)
    for (double off : {-1e-6, 1e-6}) points.push_back(k + off * (1.0 + std::abs(k)));
  double best = -std::numeric_limits<double>::infinity();
  for (double a : points) {
    double h = 1e-5 * (1.0 + std::abs(a));
    for (double k : kinks) h = std::min(h, 0.5 * std::abs(a - k));
    const double d = (w.log_density(a + h) - w.log_density(a - h)) / (2 * h);
    best = std::max(best, sign == 0 ? std::abs(d) : d);
  }
  return best;
}

inline double sup_hazard_grid(const BackgroundRisk& w, int n = 20001) {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = 1e-9 + (1.0 - 2e-9) * i / (n - 1);
    const double a = w.quantile(p);
    best = std::max(best, w.density(a) / w.cdf(a));
  }
  return best;
}

/// Literal O(|W| |X| |support|) comparison of F_{W+X} and F_W.
inline bool brute_fosd_literal(const Gamble& x, const std::vector<double>& wv,
                               const std::vector<double>& wp, double tolerance = 0.0) {
  std::vector<double> points = wv;
  for (double w : wv)
    for (const auto& o : x.outcomes()) points.push_back(w + o.value);
  for (double a : points) {
    long double fw = 0.0L, fz = 0.0L;
    for (std::size_t i = 0; i < wv.size(); ++i) {
      if (wv[i] <= a) fw += wp[i];
      for (const auto& o : x.outcomes())
        if (wv[i] + o.value <= a) fz += static_cast<long double>(wp[i]) * o.probability;
    }
    if (fz - fw > tolerance) return false;
  }
  return true;
}

/// CPT value straight from the definition on a small lottery, in long double.
inline double cpt_value_literal(std::vector<std::pair<double, double>> pts,
                                const riskdom::CptParams& c = {}) {
  std::sort(pts.begin(), pts.end());
  auto wgt = [](long double p, long double g) {
    if (p <= 0) return 0.0L;
    if (p >= 1) return 1.0L;
    return std::pow(p, g) / std::pow(std::pow(p, g) + std::pow(1 - p, g), 1 / g);
  };
  auto v = [&](long double x) {
    return x >= 0 ? std::pow(x, (long double)c.rho)
                  : -(long double)c.loss_aversion * std::pow(-x, (long double)c.rho);
  };
  long double total = 0.0L;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && pts[i].first == pts[i - 1].first) continue;  // each distinct value once
    const long double x = pts[i].first;
    long double below = 0, upto = 0, above = 0, from = 0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (pts[j].first < x) below += pts[j].second;
      if (pts[j].first <= x) upto += pts[j].second;
      if (pts[j].first > x) above += pts[j].second;
      if (pts[j].first >= x) from += pts[j].second;
    }
    if (x < 0)
      total += v(x) * (wgt(upto, c.delta) - wgt(below, c.delta));
    else if (x > 0)
      total += v(x) * (wgt(from, c.gamma) - wgt(above, c.gamma));
  }
  return static_cast<double>(total);
}

/// int_a^inf (F_Y - F_X) e^{-z/s} dz by Gauss-Kronrod on each interval
/// between support points.
inline double weighted_integral_quad(const Gamble& x, const Gamble& y, double s, double a) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts{a};
  for (const auto& o : x.outcomes())
    if (o.value > a) cuts.push_back(o.value);
  for (const auto& o : y.outcomes())
    if (o.value > a) cuts.push_back(o.value);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double c = y.cdf(mid) - x.cdf(mid);
    total += c * gauss_kronrod<double, 15>::integrate(
                     [&](double z) { return std::exp(-(z - a) / s); }, cuts[i], cuts[i + 1]);
  }
  return total;  // scaled by e^{a/s}
}

// ---- random instances -------------------------------------------------------

/// Random gamble with 2..max_outcomes outcomes, positive mean and downside.
inline Gamble random_gamble(std::mt19937_64& rng, int max_outcomes = 5, double scale = 100.0) {
  std::uniform_int_distribution<int> count(2, max_outcomes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const int k = count(rng);
    std::vector<Outcome> v;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const double p = 0.05 + unit(rng);
      v.push_back({std::round((unit(rng) * 2.0 - 0.8) * scale * 100.0) / 100.0, p});
      total += p;
    }
    for (auto& o : v) o.probability /= total;
    try {
      Gamble g(v);
      if (riskdom::mean(g) > 1e-3 * scale && g.min() < 0.0) return g;
    } catch (const riskdom::error&) {
    }
  }
}

inline Gamble random_any_gamble(std::mt19937_64& rng, int max_outcomes = 5, double scale = 100.0) {
  std::uniform_int_distribution<int> count(2, max_outcomes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const int k = count(rng);
    std::vector<Outcome> v;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      const double p = 0.05 + unit(rng);
      v.push_back({std::round((unit(rng) * 2.0 - 1.0) * scale * 100.0) / 100.0, p});
      total += p;
    }
    for (auto& o : v) o.probability /= total;
    try {
      return Gamble(v);
    } catch (const riskdom::error&) {
    }
  }
}

}  // namespace oracle
