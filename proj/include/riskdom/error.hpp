#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskdom {

enum class errc {
  invalid_gamble,
  invalid_distribution,
  invalid_argument,
  non_positive_mean,
  no_downside,
  non_positive_scale,
  negative_headroom,
  infinite_mean,
  identical_distributions,
  equal_maxima,
  mean_order_violated,
  precondition_violated,
  no_acceptance_found,
  numerical_failure,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::invalid_gamble: return "invalid gamble";
    case errc::invalid_distribution: return "invalid distribution";
    case errc::invalid_argument: return "invalid argument";
    case errc::non_positive_mean: return "non-positive mean";
    case errc::no_downside: return "gamble has no downside";
    case errc::non_positive_scale: return "non-positive scale";
    case errc::negative_headroom: return "negative headroom";
    case errc::infinite_mean: return "infinite mean";
    case errc::identical_distributions: return "identical distributions";
    case errc::equal_maxima: return "equal maxima";
    case errc::mean_order_violated: return "mean order violated";
    case errc::precondition_violated: return "precondition violated";
    case errc::no_acceptance_found: return "no acceptance found";
    case errc::numerical_failure: return "numerical failure";
  }
  return "unknown error";
}

/// True for errors caused by the caller's input rather than by a numerical
/// procedure failing to converge.
constexpr bool is_validation_error(errc code) noexcept {
  return code != errc::no_acceptance_found && code != errc::numerical_failure;
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}
  explicit error(errc code) : error(code, "") {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace riskdom
