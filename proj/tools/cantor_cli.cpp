// Command-line front end: construct, verify, premeasure, scales, embed.
//
// Exit codes: 0 ok, 1 other error, 2 invalid input or out-of-range level, 3 domination fails,
// 4 verification or distortion violations, 5 depth/precision limit.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "CLI11.hpp"
#include "cantor/cantor.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

enum Exit { kOk = 0, kError = 1, kSchema = 2, kDomination = 3, kViolation = 4, kDepth = 5 };

json parse_json_arg(const std::string& text, const char* what) {
  std::string body = text;
  if (!text.empty() && text.front() == '@') {
    std::ifstream in(text.substr(1));
    if (!in) throw cantor::InvalidParameter(std::string("cannot read ") + what + " file " + text.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw cantor::InvalidParameter(std::string("malformed ") + what + ": " + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cantor::InvalidParameter("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw cantor::InvalidParameter("malformed JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

std::optional<std::pair<std::size_t, std::size_t>> parse_window(const std::string& w) {
  if (w.empty()) return std::nullopt;
  const auto colon = w.find(':');
  if (colon == std::string::npos) throw cantor::InvalidParameter("window must look like FIRST:LAST");
  try {
    return std::pair{static_cast<std::size_t>(std::stoul(w.substr(0, colon))),
                     static_cast<std::size_t>(std::stoul(w.substr(colon + 1)))};
  } catch (const std::exception&) {
    throw cantor::InvalidParameter("window must look like FIRST:LAST");
  }
}

cantor::ChainMode parse_mode(const std::string& m) {
  if (m == "exact") return cantor::ChainMode::exact;
  if (m == "approx") return cantor::ChainMode::approx;
  throw cantor::InvalidParameter("mode must be exact or approx");
}

struct Options {
  std::string phi, psi, gauge, family, product, report;
  std::size_t depth = 64;
  unsigned precision = cantor::kDefaultPrecision;
  std::string mode = "exact";
  std::string window;
  std::uint64_t seed = 1;
  std::string out;
  std::size_t e = 0, D = 0;
  double alpha_lo = 0.05, alpha_hi = 4.0, tol = 0.1;
  std::size_t pairs = 1000, m = 0, max_k0 = 40;
};

int cmd_construct(const Options& o) {
  const cantor::Gauge phi = cantor::gauge_from_json(parse_json_arg(o.phi, "phi spec"));
  const cantor::Gauge psi = cantor::gauge_from_json(parse_json_arg(o.psi, "psi spec"));
  auto r = cantor::construct_prescribed_product(phi, psi, o.depth, o.precision, parse_mode(o.mode), parse_window(o.window));
  const std::string path = o.out.empty() ? "construction.json" : o.out;
  write_json_file(path, cantor::construction_to_json(r));
  std::cout << path << '\n';
  std::cout << "construct: depth " << r.depth << ", k0 " << r.chain.k0 << ", " << r.schedule.times.size()
            << " oscillation times, window a/v max " << r.window.a_over_v_max << ", b/v min " << r.window.b_over_v_min
            << (cantor::all_passed(r.checks) ? ", checks pass" : ", CHECKS FAIL") << (r.incomplete ? ", incomplete" : "")
            << '\n';
  return cantor::all_passed(r.checks) ? kOk : kViolation;
}

int cmd_verify(const Options& o) {
  const json report = read_json_file(o.report);
  const cantor::VerificationSummary s = cantor::verify_construction(report);
  const std::string path = o.out.empty() ? o.report + ".verify.json" : o.out;
  write_json_file(path, cantor::verification_to_json(s));
  std::cout << path << '\n';
  std::size_t failed = 0, skipped = 0;
  std::string names;
  for (const auto& c : s.checks) {
    if (c.status == cantor::CheckStatus::fail) {
      ++failed;
      names += (names.empty() ? "" : ", ") + c.name;
    }
    if (c.status == cantor::CheckStatus::skipped) ++skipped;
  }
  std::cout << "verify: " << s.checks.size() - failed - skipped << " pass, " << failed << " fail, " << skipped
            << " skipped" << (failed ? " (" + names + ")" : std::string()) << '\n';
  return failed ? kViolation : kOk;
}

int cmd_premeasure(const Options& o) {
  const cantor::CompactProduct K = cantor::product_from_json(read_json_file(o.product));
  const cantor::Gauge g = cantor::gauge_from_json(parse_json_arg(o.gauge, "gauge spec"));
  const cantor::TruncationWindow w{o.e, o.D};
  const auto h = cantor::hausdorff_premeasure(K, g, w, o.precision);
  const auto p = cantor::packing_premeasure(K, g, w, o.precision);
  json j{{"hausdorff", cantor::premeasure_to_json(h)}, {"packing", cantor::premeasure_to_json(p)}, {"window", {o.e, o.D}}};
  j["hausdorff"]["status"] = "finite";
  j["packing"]["status"] = "finite";
  j["levels"] = json::array();
  for (std::size_t i = 0; i < h.rows.size(); ++i)
    j["levels"].push_back({{"j", h.rows[i].j},
                           {"v_j_log2", h.rows[i].v_log2},
                           {"hausdorff_cost_log", h.rows[i].cost_log.value()},
                           {"hausdorff_running_opt_log", h.rows[i].running_log.value()},
                           {"packing_cost_log", p.rows[i].cost_log.value()},
                           {"packing_running_opt_log", p.rows[i].running_log.value()}});
  const std::string path = o.out.empty() ? "premeasure.json" : o.out;
  write_json_file(path, j);
  auto show = [](const cantor::PremeasureValue& v) {
    std::ostringstream os;
    if (v.exact)
      os << *v.exact;
    else
      os << "exp(" << v.log_value.value() << ")";
    return os.str();
  };
  std::cout << path << '\n' << "premeasure: hausdorff " << show(h) << ", packing " << show(p) << '\n';
  return kOk;
}

int cmd_scales(const Options& o) {
  const cantor::CompactProduct K = cantor::product_from_json(read_json_file(o.product));
  const cantor::ScalingFamily fam = cantor::family_from_json(parse_json_arg(o.family, "family spec"));
  const cantor::SearchInterval s{o.alpha_lo, o.alpha_hi, o.tol};
  cantor::LevelWindow w;
  if (auto win = parse_window(o.window)) w = {win->first, win->second};
  const auto h = cantor::estimate_hausdorff_scale(K, fam, s, w, o.precision);
  const auto p = cantor::estimate_packing_scale(K, fam, s, w, o.precision);
  const auto local = cantor::estimate_local_scales(K, fam, s, w, o.precision);
  const auto checks = cantor::check_scale_order(h, p, local);
  const std::string path = o.out.empty() ? "scales.json" : o.out;
  write_json_file(path, cantor::scale_report_to_json(fam, h, p, local, checks));
  std::cout << path << '\n'
            << "scales: scl_H [" << h.lo << ", " << h.hi << "], scl_P [" << p.lo << ", " << p.hi << "], local ("
            << local.lower.value << ", " << local.upper.value << ")\n";
  return kOk;
}

int cmd_embed(const Options& o) {
  const cantor::CompactProduct K = cantor::product_from_json(read_json_file(o.product));
  const std::size_t m = o.m == 0 ? K.depth() : o.m;
  const auto pairs = cantor::random_pairs(K, o.pairs, o.seed, m, o.max_k0);
  const auto rep = cantor::verify_distortion_bounds(pairs, m);
  const std::string path = o.out.empty() ? "embed.json" : o.out;
  write_json_file(path, cantor::distortion_report_to_json(rep));
  std::cout << path << '\n'
            << "embed: " << rep.pairs << " pairs, " << rep.violations << " violations, ratio in [" << rep.ratio_min
            << ", " << rep.ratio_max << "]\n";
  return rep.violations ? kViolation : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact products with prescribed Hausdorff and packing measures"};
  app.require_subcommand(1);
  Options o;

  auto* construct = app.add_subcommand("construct", "build the product prescribed by two gauges");
  construct->add_option("--phi", o.phi, "Hausdorff gauge (JSON or @file)")->required();
  construct->add_option("--psi", o.psi, "packing gauge (JSON or @file)")->required();
  construct->add_option("--depth", o.depth, "number of levels")->check(CLI::Range(2, 1 << 20));
  construct->add_option("--precision", o.precision, "working precision in bits")->check(CLI::Range(16, 1 << 16));
  construct->add_option("--mode", o.mode, "exact or approx");
  construct->add_option("--window", o.window, "density window FIRST:LAST");
  construct->add_option("--out", o.out, "report path");

  auto* verify = app.add_subcommand("verify", "re-check a stored construction report");
  verify->add_option("report", o.report, "report path")->required();
  verify->add_option("--out", o.out, "summary path");

  auto* premeasure = app.add_subcommand("premeasure", "restricted Hausdorff and packing premeasures");
  premeasure->add_option("--product", o.product, "product or construction report")->required();
  premeasure->add_option("--gauge,--phi", o.gauge, "gauge (JSON or @file)")->required();
  premeasure->add_option("--e", o.e, "shallowest ball level")->required();
  premeasure->add_option("--D", o.D, "deepest ball level")->required();
  premeasure->add_option("--precision", o.precision, "working precision in bits");
  premeasure->add_option("--out", o.out, "report path");

  auto* scales = app.add_subcommand("scales", "Hausdorff, packing and local scales");
  scales->add_option("--product", o.product, "product or construction report")->required();
  scales->add_option("--family", o.family, "scaling family (JSON or @file)")->required();
  scales->add_option("--alpha-lo", o.alpha_lo, "lower end of the search");
  scales->add_option("--alpha-hi", o.alpha_hi, "upper end of the search");
  scales->add_option("--tol", o.tol, "target bracket width");
  scales->add_option("--window", o.window, "level window FIRST:LAST");
  scales->add_option("--precision", o.precision, "working precision in bits");
  scales->add_option("--out", o.out, "report path");

  auto* embed = app.add_subcommand("embed", "check the distortion bounds of the embedding");
  embed->add_option("--product", o.product, "product or construction report")->required();
  embed->add_option("--pairs", o.pairs, "number of random pairs");
  embed->add_option("--seed", o.seed, "random seed");
  embed->add_option("--m", o.m, "truncation (default: product depth)");
  embed->add_option("--max-k0", o.max_k0, "largest first-difference index");
  embed->add_option("--out", o.out, "report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchema;
  }

  try {
    if (*construct) return cmd_construct(o);
    if (*verify) return cmd_verify(o);
    if (*premeasure) return cmd_premeasure(o);
    if (*scales) return cmd_scales(o);
    if (*embed) return cmd_embed(o);
  } catch (const cantor::DominationViolated& e) {
    std::cerr << "domination fails: " << e.what() << '\n';
    return kDomination;
  } catch (const cantor::InvalidParameter& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kSchema;
  } catch (const cantor::OutOfDepth& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kSchema;
  } catch (const json::exception& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kSchema;
  } catch (const cantor::DepthLimitError& e) {
    std::cerr << "depth limit: " << e.what() << '\n';
    return kDepth;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
