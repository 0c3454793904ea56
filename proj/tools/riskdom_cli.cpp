// riskdom: command-line calculator for background-risk dominance.
//
// Exit status: 0 on success, 2 on invalid input, 1 when a numerical procedure
// fails. Results go to stdout, one-line diagnostics to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "riskdom/riskdom.hpp"

namespace {

using namespace riskdom;
using json_io::json;

enum class Format { json, csv, pretty };

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string load_text(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1));
  if (!in) throw usage_error("cannot read " + arg.substr(1));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Gamble read_gamble(const std::string& arg) {
  return json_io::gamble_from_json(json_io::parse(load_text(arg)));
}

std::pair<Gamble, Gamble> read_pair(const std::string& arg) {
  const auto j = json_io::parse(load_text(arg));
  return {json_io::gamble_from_json(json_io::field(j, "x")),
          json_io::gamble_from_json(json_io::field(j, "y"))};
}

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string general(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void emit_json(const json& j, Format fmt) {
  if (fmt == Format::pretty)
    std::cout << j.dump(2) << '\n';
  else
    std::cout << j.dump() << '\n';
}

/// Distribution from --dist JSON, or from --family with --sigma (and --mu).
struct DistArgs {
  std::string dist;
  std::string family;
  std::optional<double> sigma;
  std::optional<double> mu;

  void add(CLI::App* cmd) {
    cmd->add_option("--dist", dist, "distribution JSON (inline or @file)");
    cmd->add_option("--family", family, "laplace | logistic | normal (with --sigma)");
    cmd->add_option("--sigma", sigma, "standard deviation of the background risk");
    cmd->add_option("--mu", mu, "mean of the background risk (default 0)");
  }
  BackgroundRisk get() const {
    if (!dist.empty()) return json_io::dist_from_json(json_io::parse(load_text(dist)));
    if (family.empty() || !sigma)
      throw usage_error("a distribution is required: --dist, or --family with --sigma");
    return BackgroundRisk::with_stdev(json_io::family_from_string(family), mu.value_or(0.0),
                                      *sigma);
  }
};

void add_format(CLI::App* cmd, Format& fmt) {
  cmd->add_option("--format", fmt, "json | csv | pretty")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Format>{{"json", Format::json},
                                        {"csv", Format::csv},
                                        {"pretty", Format::pretty}},
          CLI::ignore_case));
}

void print_threshold_table(const std::vector<std::vector<double>>& values,
                           const std::vector<std::string>& labels,
                           const std::vector<std::pair<double, double>>& stakes, bool round,
                           Format fmt) {
  auto cell = [&](double v) {
    if (std::isnan(v)) return std::string();
    return round ? fixed(round_up_dollars(v), 0) : fixed(v, 4);
  };
  if (fmt == Format::json) {
    json rows = json::array();
    for (std::size_t i = 0; i < values.size(); ++i) {
      auto num = [&](double v) {
        return std::isnan(v) ? json(nullptr) : json_io::number(round ? round_up_dollars(v) : v);
      };
      rows.push_back({{"gamble", labels[i]},
                      {"gain", stakes[i].first},
                      {"loss", stakes[i].second},
                      {"laplace", num(values[i][0])},
                      {"logistic", num(values[i][1])},
                      {"normal", num(values[i][2])}});
    }
    std::cout << rows.dump() << '\n';
    return;
  }
  if (fmt == Format::csv) {
    std::cout << "gamble,gain,loss,laplace,logistic,normal\n";
    for (std::size_t i = 0; i < values.size(); ++i)
      std::cout << labels[i] << ',' << general(stakes[i].first) << ','
                << general(stakes[i].second) << ',' << cell(values[i][0]) << ','
                << cell(values[i][1]) << ',' << cell(values[i][2]) << '\n';
    return;
  }
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %14s %14s %14s\n", "Gain/Loss", "Laplace", "Logistic",
                "Normal");
  std::cout << line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(line, sizeof line, "%-12s %14s %14s %14s\n", labels[i].c_str(),
                  cell(values[i][0]).c_str(), cell(values[i][1]).c_str(),
                  cell(values[i][2]).c_str());
    std::cout << line;
  }
}

int run(int argc, char** argv) {
  CLI::App app{"Background-risk dominance calculator"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Format fmt = Format::json;
  std::string gamble_arg, pair_arg;
  DistArgs dist;
  std::optional<double> ell, mu, s_opt;
  bool round = false, fast = false;
  int which = 1;
  std::string family;
  std::size_t points = 20000;
  std::uint64_t seed = 42, samples = 1'000'000;
  unsigned threads = 1;
  double u_scale = 100.0;

  auto* riskiness_cmd = app.add_subcommand("riskiness", "riskiness R(X) of a gamble");
  riskiness_cmd->add_option("--gamble", gamble_arg, "gamble JSON (inline or @file)")->required();
  add_format(riskiness_cmd, fmt);

  auto* size_cmd = app.add_subcommand("size", "exponential size indices of a background risk");
  dist.add(size_cmd);
  add_format(size_cmd, fmt);

  auto* fosd_cmd = app.add_subcommand("check-fosd", "first-order dominance of W + X over W");
  fosd_cmd->add_option("--gamble", gamble_arg)->required();
  dist.add(fosd_cmd);
  fosd_cmd->add_option("--ell", ell, "limited-liability floor");
  bool grid_only = false;
  fosd_cmd->add_flag("--grid", grid_only, "skip the closed-form bound");
  add_format(fosd_cmd, fmt);

  auto* sosd_cmd = app.add_subcommand("check-sosd", "second-order dominance of W + X over W");
  sosd_cmd->add_option("--gamble", gamble_arg)->required();
  dist.add(sosd_cmd);
  add_format(sosd_cmd, fmt);

  auto* threshold_cmd =
      app.add_subcommand("threshold", "minimal background-risk sigma per family");
  threshold_cmd->add_option("--gamble", gamble_arg)->required();
  threshold_cmd->add_option("--mu", mu, "mean of the normal background (limited liability)");
  threshold_cmd->add_option("--ell", ell, "limited-liability floor for the normal column");
  add_format(threshold_cmd, fmt);

  auto* table_cmd = app.add_subcommand("table", "threshold tables for the standard gambles");
  table_cmd->add_option("--which", which, "1: monotone preferences, 2: CPT")
      ->check(CLI::IsMember({1, 2}));
  table_cmd->add_option("--mu", mu, "normal-column mean (table 1)");
  table_cmd->add_option("--ell", ell, "normal-column floor (table 1)");
  table_cmd->add_flag("--round", round, "round up to whole dollars");
  table_cmd->add_flag("--fast", fast, "table 2 with 5000 points");
  Format table_fmt = Format::csv;
  add_format(table_cmd, table_fmt);

  auto* cpt_cmd = app.add_subcommand("cpt-threshold", "minimal sigma for CPT acceptance");
  cpt_cmd->add_option("--gamble", gamble_arg)->required();
  cpt_cmd->add_option("--family", family, "laplace | logistic | normal")->required();
  cpt_cmd->add_option("--points", points, "discretisation points (>= 1000)");
  add_format(cpt_cmd, fmt);

  auto* compare_cmd = app.add_subcommand("compare", "choice between two gambles");
  compare_cmd->add_option("--pair", pair_arg, "{\"x\":<gamble>,\"y\":<gamble>}")->required();
  compare_cmd->add_option("--s", s_opt, "evaluate the weighted criterion at this s");
  dist.add(compare_cmd);
  add_format(compare_cmd, fmt);

  auto* min_s_cmd = app.add_subcommand("min-s", "smallest s of the weighted criterion");
  min_s_cmd->add_option("--pair", pair_arg)->required();
  add_format(min_s_cmd, fmt);

  auto* oracle_cmd = app.add_subcommand("oracle", "Monte Carlo check of first-order dominance");
  oracle_cmd->add_option("--gamble", gamble_arg)->required();
  dist.add(oracle_cmd);
  oracle_cmd->add_option("--seed", seed);
  oracle_cmd->add_option("--samples", samples);
  oracle_cmd->add_option("--threads", threads);
  add_format(oracle_cmd, fmt);

  auto* demo_cmd = app.add_subcommand(
      "demo-appendix-b", "rejection of small negative-mean gambles under limited liability");
  demo_cmd->add_option("--gamble", gamble_arg, "default: win 10 / lose 11");
  dist.add(demo_cmd);
  demo_cmd->add_option("--ell", ell, "floor (default 0)");
  demo_cmd->add_option("--u-scale", u_scale, "scale c of u(a) = 1 - exp(-a/c)");
  add_format(demo_cmd, fmt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  if (riskiness_cmd->parsed()) {
    const auto x = read_gamble(gamble_arg);
    const auto r = riskiness(x);
    if (fmt == Format::csv) {
      std::cout << "riskiness\n" << general(r.riskiness) << '\n';
      return 0;
    }
    auto j = json_io::to_json(r);
    j["bound"] = json_io::number(riskiness_bound(x));
    emit_json(j, fmt);
  } else if (size_cmd->parsed()) {
    emit_json(json_io::to_json(size_report(dist.get())), fmt);
  } else if (fosd_cmd->parsed()) {
    const auto x = read_gamble(gamble_arg);
    const auto w = dist.get();
    DominanceReport r;
    if (ell)
      r = fosd_verify_limited_liability(x, w, *ell);
    else
      r = grid_only ? fosd_verify(x, w) : fosd_check(x, w);
    emit_json(json_io::to_json(r), fmt);
  } else if (sosd_cmd->parsed()) {
    emit_json(json_io::to_json(sosd_verify(read_gamble(gamble_arg), dist.get())), fmt);
  } else if (threshold_cmd->parsed()) {
    const auto x = read_gamble(gamble_arg);
    json j{{"laplace", json_io::number(sigma_threshold_laplace(x))},
           {"logistic", json_io::number(sigma_threshold_logistic(x))},
           {"normal", nullptr}};
    if (mu && ell) j["normal"] = json_io::number(sigma_threshold_normal(x, *mu, *ell));
    emit_json(j, fmt);
  } else if (table_cmd->parsed()) {
    std::vector<std::vector<double>> values;
    std::vector<std::string> labels;
    std::vector<std::pair<double, double>> stakes;
    if (which == 1) {
      if (mu.has_value() != ell.has_value())
        throw usage_error("--mu and --ell must be given together");
      for (const auto& r : table1(mu, ell)) {
        values.push_back({r.sigma_laplace, r.sigma_logistic,
                          r.sigma_normal.value_or(detail::nan)});
        labels.push_back(r.label);
        stakes.emplace_back(r.gain, r.loss);
      }
    } else {
      const std::size_t n = fast ? 5000 : 20000;
      if (fast)
        std::cerr << "note: --fast uses 5000 discretisation points; entries may differ from "
                     "the full computation by about 0.1%\n";
      for (const auto& r : table2({}, n)) {
        values.push_back({r.sigma_laplace, r.sigma_logistic, r.sigma_normal});
        labels.push_back(r.label);
        stakes.emplace_back(r.gain, r.loss);
      }
    }
    print_threshold_table(values, labels, stakes, round, table_fmt);
  } else if (cpt_cmd->parsed()) {
    const auto x = read_gamble(gamble_arg);
    const auto t =
        cpt_sigma_threshold_detail(x, json_io::family_from_string(family), {}, points);
    emit_json({{"family", family},
               {"sigma", json_io::number(t.sigma)},
               {"rejected_below", json_io::number(t.rejected_below)},
               {"points", points},
               {"evaluations", t.evaluations}},
              fmt);
  } else if (compare_cmd->parsed()) {
    const auto [x, y] = read_pair(pair_arg);
    json j{{"strong_convex", json_io::to_json(strong_convex_dominance(x, y))}};
    if (s_opt) j["weighted"] = json_io::to_json(weighted_integral_criterion(x, y, *s_opt));
    if (x.max() != y.max()) j["min_s"] = json_io::number(min_s_for_dominance(x, y));
    if (!dist.dist.empty() || !dist.family.empty())
      j["two_sided"] = json_io::to_json(two_sided_sufficiency(x, y, dist.get()));
    emit_json(j, fmt);
  } else if (min_s_cmd->parsed()) {
    const auto [x, y] = read_pair(pair_arg);
    const auto r = min_s_for_dominance_detail(x, y);
    emit_json({{"min_s", json_io::number(r.s)},
               {"monotone_verified", r.monotone_verified},
               {"evaluations", r.evaluations}},
              fmt);
  } else if (oracle_cmd->parsed()) {
    OracleConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.threads = threads;
    emit_json(json_io::to_json(mc_fosd_oracle(read_gamble(gamble_arg), dist.get(), cfg), seed),
              fmt);
  } else if (demo_cmd->parsed()) {
    const auto x = gamble_arg.empty() ? Gamble::fifty_fifty(10.0, 11.0) : read_gamble(gamble_arg);
    const auto w = (dist.dist.empty() && dist.family.empty()) ? BackgroundRisk::laplace(100.0, 110.0)
                                                              : dist.get();
    auto j = json_io::to_json(small_negative_gamble_rejection(x, w, ell.value_or(0.0), u_scale));
    j["gamble"] = json_io::to_json(x);
    j["dist"] = json_io::to_json(w);
    emit_json(j, fmt);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const riskdom::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return riskdom::is_validation_error(e.code()) ? 2 : 1;
  } catch (const usage_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid JSON input: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
