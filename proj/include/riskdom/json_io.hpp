#pragma once

// JSON encoding of gambles, background risks and reports.
//
//   gamble: {"outcomes":[{"x":110,"p":0.5},{"x":-100,"p":0.5}]}
//           (optionally "degenerate":true for a one-point gamble)
//   dist:   {"family":"laplace"|"logistic"|"normal","loc":0,"scale_or_sigma":110}
//           {"family":"piecewise","knots":[...],"log_coeffs":[[c0,c1,c2],...]}
//   pair:   {"x":<gamble>,"y":<gamble>}
//
// For laplace and logistic, scale_or_sigma is the family scale (lambda, s);
// for normal it is sigma. Non-finite numbers are written as the strings
// "inf", "-inf" and "nan".

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "riskdom/background_risk.hpp"
#include "riskdom/cpt.hpp"
#include "riskdom/dominance.hpp"
#include "riskdom/error.hpp"
#include "riskdom/gamble.hpp"
#include "riskdom/thresholds.hpp"
#include "riskdom/two_gamble.hpp"
#include "riskdom/verify.hpp"

namespace riskdom::json_io {

using nlohmann::json;

inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

inline double read_number(const json& j, std::string_view what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return detail::inf;
    if (s == "-inf") return -detail::inf;
    if (s == "nan") return detail::nan;
  }
  throw error(errc::invalid_argument, std::string(what) + " must be a number");
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw error(errc::invalid_argument, "expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw error(errc::invalid_argument, std::string("missing field \"") + key + "\"");
  return *it;
}

/// Parses text, turning syntax errors into validation errors.
inline json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw error(errc::invalid_argument, std::string("malformed JSON: ") + e.what());
  }
}

// ---- gamble ---------------------------------------------------------------

inline json to_json(const Gamble& g) {
  json out = json::array();
  for (const auto& o : g.outcomes()) out.push_back({{"x", o.value}, {"p", o.probability}});
  json j{{"outcomes", out}};
  if (g.is_degenerate()) j["degenerate"] = true;
  return j;
}

inline Gamble gamble_from_json(const json& j) {
  const auto& outs = field(j, "outcomes");
  if (!outs.is_array()) throw error(errc::invalid_gamble, "\"outcomes\" must be an array");
  std::vector<Outcome> v;
  for (const auto& o : outs)
    v.push_back({read_number(field(o, "x"), "x"), read_number(field(o, "p"), "p")});
  const bool degenerate = j.contains("degenerate") && j["degenerate"].is_boolean() &&
                          j["degenerate"].get<bool>();
  return Gamble::from_outcomes(std::move(v), degenerate);
}

// ---- background risk ------------------------------------------------------

inline json to_json(const BackgroundRisk& w) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, family::Laplace>)
          return {{"family", "laplace"}, {"loc", d.mu}, {"scale_or_sigma", d.lambda}};
        else if constexpr (std::is_same_v<T, family::Logistic>)
          return {{"family", "logistic"}, {"loc", d.mu}, {"scale_or_sigma", d.s}};
        else if constexpr (std::is_same_v<T, family::Normal>)
          return {{"family", "normal"}, {"loc", d.mu}, {"scale_or_sigma", d.sigma}};
        else {
          json coeffs = json::array();
          for (const auto& p : d.pieces()) {
            json c{p.c0, p.c1, p.c2};
            if (p.origin != 0.0) c.push_back(p.origin);
            coeffs.push_back(c);
          }
          return {{"family", "piecewise"},
                  {"knots", std::vector<double>(d.knots().begin(), d.knots().end())},
                  {"log_coeffs", coeffs}};
        }
      },
      w.variant());
}

inline BackgroundRisk dist_from_json(const json& j) {
  const auto& fam = field(j, "family");
  if (!fam.is_string()) throw error(errc::invalid_distribution, "\"family\" must be a string");
  const auto name = fam.get<std::string>();
  if (name == "piecewise") {
    std::vector<double> knots;
    for (const auto& k : field(j, "knots")) knots.push_back(read_number(k, "knot"));
    std::vector<LogQuadratic> pieces;
    for (const auto& c : field(j, "log_coeffs")) {
      if (!c.is_array() || c.size() < 2 || c.size() > 4)
        throw error(errc::invalid_distribution,
                    "log_coeffs entries must be [c0, c1], [c0, c1, c2] or [c0, c1, c2, origin]");
      pieces.push_back({read_number(c[0], "c0"), read_number(c[1], "c1"),
                        c.size() >= 3 ? read_number(c[2], "c2") : 0.0,
                        c.size() == 4 ? read_number(c[3], "origin") : 0.0});
    }
    return BackgroundRisk::piecewise(std::move(knots), std::move(pieces));
  }
  const double loc = read_number(field(j, "loc"), "loc");
  const double scale = read_number(field(j, "scale_or_sigma"), "scale_or_sigma");
  if (name == "laplace") return BackgroundRisk::laplace(loc, scale);
  if (name == "logistic") return BackgroundRisk::logistic(loc, scale);
  if (name == "normal") return BackgroundRisk::normal(loc, scale);
  throw error(errc::invalid_distribution, "unknown family \"" + name + "\"");
}

inline Family family_from_string(std::string_view name) {
  if (name == "laplace") return Family::laplace;
  if (name == "logistic") return Family::logistic;
  if (name == "normal") return Family::normal;
  throw error(errc::invalid_distribution, "unknown family \"" + std::string(name) + "\"");
}

// ---- reports --------------------------------------------------------------

inline json to_json(const RiskinessResult& r) {
  return {{"riskiness", number(r.riskiness)},
          {"alpha", number(r.alpha)},
          {"residual", number(r.residual)},
          {"iterations", r.iterations}};
}

inline json to_json(const SizeReport& s) {
  return {{"exp_size", number(s.s_left)},
          {"exp_size_two_sided", number(s.s_two_sided)},
          {"exp_size_second_order", number(s.s_second_order)}};
}

inline json to_json(const DominanceReport& r) {
  json j{{"verdict", to_string(r.verdict)},
         {"worst_margin", number(r.worst_margin)},
         {"witness_a", number(r.witness_a)},
         {"method", to_string(r.method)},
         {"grid_points", r.grid.points},
         {"refinement_passes", r.grid.refinement_passes},
         {"sufficient_condition", r.sufficient_condition}};
  j["tail_coefficient"] = number(r.tail_coefficient);
  return j;
}

inline Verdict verdict_from_string(std::string_view s) {
  for (auto v : {Verdict::dominant, Verdict::not_dominant, Verdict::sufficient_condition_met,
                 Verdict::inconclusive})
    if (to_string(v) == s) return v;
  throw error(errc::invalid_argument, "unknown verdict \"" + std::string(s) + "\"");
}

inline DominanceReport dominance_report_from_json(const json& j) {
  DominanceReport r;
  r.verdict = verdict_from_string(field(j, "verdict").get<std::string>());
  r.worst_margin = read_number(field(j, "worst_margin"), "worst_margin");
  r.witness_a = read_number(field(j, "witness_a"), "witness_a");
  const auto method = field(j, "method").get<std::string>();
  if (method == to_string(Method::theorem_bound))
    r.method = Method::theorem_bound;
  else if (method == to_string(Method::grid_verification))
    r.method = Method::grid_verification;
  else
    throw error(errc::invalid_argument, "unknown method \"" + method + "\"");
  if (j.contains("grid_points")) r.grid.points = j["grid_points"].get<std::size_t>();
  if (j.contains("refinement_passes")) r.grid.refinement_passes = j["refinement_passes"].get<int>();
  if (j.contains("sufficient_condition"))
    r.sufficient_condition = j["sufficient_condition"].get<bool>();
  if (j.contains("tail_coefficient") && !j["tail_coefficient"].is_null())
    r.tail_coefficient = read_number(j["tail_coefficient"], "tail_coefficient");
  return r;
}

inline json to_json(const PairReport& r) {
  return {{"verdict", r.verdict},
          {"worst_margin", number(r.worst_margin)},
          {"witness_a", number(r.witness_a)},
          {"s_used", number(r.s_used)}};
}

inline PairReport pair_report_from_json(const json& j) {
  PairReport r;
  r.verdict = field(j, "verdict").get<bool>();
  r.worst_margin = read_number(field(j, "worst_margin"), "worst_margin");
  r.witness_a = read_number(field(j, "witness_a"), "witness_a");
  if (j.contains("s_used") && !j["s_used"].is_null()) r.s_used = read_number(j["s_used"], "s_used");
  return r;
}

inline json to_json(const TwoSidedReport& r) {
  json j = to_json(r.grid);
  j["exp_size_two_sided"] = number(r.s_star);
  j["laplace_flip_scale"] = number(r.laplace_flip);
  j["size_exceeds_flip"] = r.size_exceeds_flip;
  return j;
}

/// Same shape as a dominance report, with the Monte Carlo specifics added.
inline json to_json(const OracleReport& r, std::uint64_t seed) {
  return {{"verdict", to_string(r.verdict)},
          {"worst_margin", number(r.worst_margin)},
          {"witness_a", number(r.witness_a)},
          {"method", "MonteCarlo"},
          {"worst_z", number(r.worst_z)},
          {"samples", r.samples},
          {"grid_points", r.grid_points},
          {"seed", seed}};
}

inline json to_json(const ThresholdRow& r) {
  return {{"gamble", r.label},
          {"gain", r.gain},
          {"loss", r.loss},
          {"laplace", number(r.sigma_laplace)},
          {"logistic", number(r.sigma_logistic)},
          {"normal", number(r.sigma_normal)}};
}

inline json to_json(const CptTableRow& r) {
  return {{"gamble", r.label},
          {"gain", r.gain},
          {"loss", r.loss},
          {"laplace", number(r.sigma_laplace)},
          {"logistic", number(r.sigma_logistic)},
          {"normal", number(r.sigma_normal)}};
}

inline json to_json(const RejectionResult& r) {
  json sweep = json::array();
  for (const auto& p : r.sweep) sweep.push_back({{"t", p.t}, {"difference", number(p.difference)}});
  return {{"t_bar", number(r.t_bar)}, {"sweep", sweep}};
}

}  // namespace riskdom::json_io
