#pragma once

// Minimal background-risk standard deviations that make accepting a gamble
// dominant, per distribution family.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "riskdom/error.hpp"
#include "riskdom/gamble.hpp"

namespace riskdom {

/// Laplace: S(W) = lambda = sigma / sqrt(2).
inline double sigma_threshold_laplace(const Gamble& x) {
  return std::numbers::sqrt2 * riskiness(x).riskiness;
}

/// Logistic: S(W) = sqrt(3) sigma / pi.
inline double sigma_threshold_logistic(const Gamble& x) {
  return std::numbers::pi / std::numbers::sqrt3 * riskiness(x).riskiness;
}

/// Normal(mu, sigma) with limited liability at ell.
inline double sigma_threshold_normal(const Gamble& x, double mu, double ell) {
  const double headroom = mu - ell + x.max();
  if (!(headroom > 0.0)) throw error(errc::negative_headroom);
  return std::sqrt(riskiness(x).riskiness * headroom);
}

struct ThresholdRow {
  std::string label;
  double gain;
  double loss;
  double sigma_laplace;
  double sigma_logistic;
  std::optional<double> sigma_normal;
  std::optional<double> normal_mu;
  std::optional<double> ell;
};

/// Gain/loss pairs of the fifty-fifty gambles in the published tables.
inline constexpr std::array<std::array<double, 2>, 5> table_gambles{{
    {11.0, 10.0}, {55.0, 50.0}, {110.0, 100.0}, {550.0, 500.0}, {1100.0, 1000.0}}};

inline std::string gamble_label(double gain, double loss) {
  auto whole = [](double v) { return std::to_string(static_cast<long long>(std::llround(v))); };
  return whole(gain) + "/" + whole(loss);
}

inline ThresholdRow threshold_row(double gain, double loss, std::optional<double> mu,
                                  std::optional<double> ell) {
  const auto x = Gamble::fifty_fifty(gain, loss);
  ThresholdRow row{gamble_label(gain, loss), gain, loss, sigma_threshold_laplace(x),
                   sigma_threshold_logistic(x), std::nullopt, mu, ell};
  if (mu && ell) row.sigma_normal = sigma_threshold_normal(x, *mu, *ell);
  return row;
}

/// The monotone-preference threshold table for the five standard gambles.
inline std::vector<ThresholdRow> table1(std::optional<double> mu, std::optional<double> ell) {
  std::vector<ThresholdRow> rows;
  for (const auto& [gain, loss] : table_gambles) rows.push_back(threshold_row(gain, loss, mu, ell));
  return rows;
}

/// Whole dollars, rounded up: the tables state sufficient "sigma >=" bounds.
inline double round_up_dollars(double v) { return std::ceil(v - 1e-9 * std::abs(v)); }

}  // namespace riskdom
