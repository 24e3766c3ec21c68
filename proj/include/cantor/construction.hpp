#pragma once

// The full pipeline gauges -> compact product, its report format, and the
// re-verification of a stored report.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/gauge.hpp"
#include "cantor/log_real.hpp"
#include "cantor/seqbuild.hpp"
#include "json.hpp"

namespace cantor {

/// Pointwise and subsequence invariants of a chain against its envelope.
inline std::vector<InvariantCheck> check_chain_invariants(const Envelope& u, const OscillationSchedule& sched,
                                                          const DivisibilityChain& c) {
  const TargetSequences& t = u.targets();
  const unsigned prec = t.precision_bits();
  const std::size_t depth = std::min(u.depth(), c.depth());
  const LogReal ln2 = LogReal::ln2(prec);
  std::vector<InvariantCheck> out;

  auto first_failure = [](InvariantCheck& chk, std::size_t k, const std::string& what) {
    if (chk.status == CheckStatus::fail) return;
    chk.status = CheckStatus::fail;
    chk.detail = what + " at k = " + std::to_string(k);
  };

  InvariantCheck start{"chain_starts_at_one"};
  if (depth > 0 && (c.mode == ChainMode::exact ? c.v[0] != 1 : c.v_log2[0] != 0.0))
    first_failure(start, 1, "v_1 != 1");
  out.push_back(start);

  InvariantCheck div{"divisibility"};
  InvariantCheck cons{"branching_consistent"};
  if (c.mode == ChainMode::exact) {
    for (std::size_t k = 1; k < depth; ++k)
      if (sgn(c.v[k - 1]) <= 0 || !mpz_divisible_p(c.v[k].get_mpz_t(), c.v[k - 1].get_mpz_t()))
        first_failure(div, k + 1, "v_k does not divide v_(k+1)");
    mpz_class prev = 1;
    for (std::size_t k = 1; k <= depth && k <= c.n.size(); ++k) {
      if (c.v[k - 1] != prev * c.n[k - 1]) first_failure(cons, k, "v_k != v_(k-1) * n_k");
      prev = c.v[k - 1];
    }
    if (c.n.size() != c.v.size()) first_failure(cons, c.n.size(), "length mismatch between n and v");
  } else {
    div.status = CheckStatus::skipped;
    div.detail = "approximate chain";
    cons.status = CheckStatus::skipped;
    cons.detail = "approximate chain";
  }
  out.push_back(div);
  out.push_back(cons);

  InvariantCheck sandwich{"sandwich"};
  InvariantCheck ratios{"ratio_bounds"};
  if (c.k0 != 0) {
    for (std::size_t k = c.k0; k <= depth; ++k) {
      const LogReal lv = detail::ln_chain(c, k, prec);
      const LogReal& lu = u.value(k);
      if (certainly_greater(lu - ln2, lv)) first_failure(sandwich, k, "v_k < u_k / 2");
      if (certainly_greater(lv, lu)) first_failure(sandwich, k, "v_k > u_k");
      if (certainly_greater(t.a(k) - lv, ln2)) first_failure(ratios, k, "a_k / v_k > 2");
      if (certainly_less(t.b(k) - lv, LogReal(prec))) first_failure(ratios, k, "b_k / v_k < 1");
    }
  }
  out.push_back(sandwich);
  out.push_back(ratios);

  InvariantCheck attain{"subsequence_attainment"};
  for (std::size_t T : sched.times) {
    if (c.k0 == 0 || T < c.k0 || T + 1 > depth) continue;
    if (certainly_less(t.a(T) - detail::ln_chain(c, T, prec), LogReal(prec))) first_failure(attain, T, "a_T / v_T < 1");
    if (certainly_greater(t.b(T + 1) - detail::ln_chain(c, T + 1, prec), ln2))
      first_failure(attain, T + 1, "b_(T+1) / v_(T+1) > 2");
  }
  out.push_back(attain);

  InvariantCheck env{"envelope"};
  for (std::size_t k = 1; k <= u.depth(); ++k) {
    if (certainly_greater(t.a(k), u.value(k)) || certainly_greater(u.value(k), t.b(k)))
      first_failure(env, k, "a_k <= u_k <= b_k violated");
    if (k > 1 && certainly_less(u.value(k), u.value(k - 1))) first_failure(env, k, "u decreasing");
  }
  for (std::size_t T : sched.times) {
    if (T > u.depth()) continue;
    if (u.entry(T).side != Target::a || u.entry(T).index != T) first_failure(env, T, "u_T != a_T");
    if (T + 1 <= u.depth() && (u.entry(T + 1).side != Target::b || u.entry(T + 1).index != T + 1))
      first_failure(env, T + 1, "u_(T+1) != b_(T+1)");
  }
  out.push_back(env);
  return out;
}

inline bool all_passed(const std::vector<InvariantCheck>& checks) {
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return false;
  return true;
}

// ---------------------------------------------------------------------------

/// Finite-depth stand-in for limsup a_k/v_k and liminf b_k/v_k.
struct WindowSummary {
  std::size_t first = 0;
  std::size_t last = 0;
  double a_over_v_max = std::numeric_limits<double>::quiet_NaN();
  double b_over_v_min = std::numeric_limits<double>::quiet_NaN();
  bool has_T = false;           // some T_l >= k0 inside the window
  bool has_T_plus_one = false;  // some T_l + 1 >= k0 inside the window
};

inline WindowSummary window_summary(const Envelope& u, const OscillationSchedule& sched, const DivisibilityChain& c,
                                    std::size_t first, std::size_t last) {
  const TargetSequences& t = u.targets();
  WindowSummary w;
  w.first = first;
  w.last = std::min(last, c.depth());
  if (c.k0 == 0) return w;
  const std::size_t lo = std::max(first, c.k0);
  for (std::size_t k = lo; k <= w.last; ++k) {
    const LogReal lv = detail::ln_chain(c, k, t.precision_bits());
    const double ra = std::exp((t.a(k) - lv).value());
    const double rb = std::exp((t.b(k) - lv).value());
    if (!(w.a_over_v_max >= ra)) w.a_over_v_max = ra;
    if (!(w.b_over_v_min <= rb)) w.b_over_v_min = rb;
  }
  for (std::size_t T : sched.times) {
    if (T >= lo && T <= w.last) w.has_T = true;
    if (T + 1 >= lo && T + 1 <= w.last) w.has_T_plus_one = true;
  }
  return w;
}

struct ConstructionReport {
  Gauge phi;
  Gauge psi;
  DominationCertificate domination;
  double C = 1;
  std::size_t depth = 0;
  unsigned precision_bits = kDefaultPrecision;
  OscillationSchedule schedule;
  Envelope envelope;
  DivisibilityChain chain;
  WindowSummary window;
  std::vector<InvariantCheck> checks;
  bool incomplete = false;
  std::vector<std::string> warnings;

  const TargetSequences& targets() const { return envelope.targets(); }
};

/// Builds the compact product prescribed by (phi, psi) down to `depth`.
/// The density window defaults to [k0, depth].
inline ConstructionReport construct_prescribed_product(const Gauge& phi, const Gauge& psi, std::size_t depth,
                                                       unsigned prec = kDefaultPrecision,
                                                       ChainMode mode = ChainMode::exact,
                                                       std::optional<std::pair<std::size_t, std::size_t>> window = {}) {
  if (depth < 2) throw InvalidParameter("construct: depth must be >= 2");
  DominationCertificate cert = check_domination(phi, psi, depth, prec);
  if (cert.status == DominationStatus::fails)
    throw DominationViolated("psi(2 eps) <= C phi(eps) fails: log-ratio keeps increasing up to level " +
                             std::to_string(depth));

  TargetSequences targets = targets_from_gauges(phi, psi, cert.C, depth, prec);
  OscillationSchedule sched = oscillation_times(targets);
  Envelope envelope = build_envelope(targets, sched);
  DivisibilityChain chain = build_chain(envelope, prec, mode);

  std::size_t first = chain.k0 == 0 ? 1 : chain.k0;
  std::size_t last = depth;
  if (window) {
    first = window->first;
    last = window->second;
    if (first < 1 || last > depth || first > last) throw InvalidParameter("construct: window outside [1, depth]");
  }
  WindowSummary ws = window_summary(envelope, sched, chain, first, last);
  std::vector<InvariantCheck> checks = check_chain_invariants(envelope, sched, chain);

  std::vector<std::string> warnings;
  if (cert.status == DominationStatus::indeterminate)
    warnings.push_back("domination: trend of the ratio is indeterminate; proceeding with the observed maximum");
  warnings.insert(warnings.end(), sched.warnings.begin(), sched.warnings.end());
  warnings.insert(warnings.end(), chain.warnings.begin(), chain.warnings.end());
  const bool incomplete = !(ws.has_T && ws.has_T_plus_one);
  if (incomplete) warnings.push_back("window contains no complete oscillation time beyond k0");

  return ConstructionReport{phi,   psi,    cert,         cert.C,    depth,      prec,    std::move(sched),
                            std::move(envelope), std::move(chain), ws, std::move(checks), incomplete,
                            std::move(warnings)};
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json log_real_json(const LogReal& x) {
  return {{"value", x.value()}, {"error_bound", x.error_bound()}};
}

inline nlohmann::json checks_json(const std::vector<InvariantCheck>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return arr;
}

inline nlohmann::json window_json(const WindowSummary& w) {
  return {{"first", w.first},
          {"last", w.last},
          {"a_over_v_max", w.a_over_v_max},
          {"b_over_v_min", w.b_over_v_min},
          {"has_T", w.has_T},
          {"has_T_plus_one", w.has_T_plus_one}};
}

}  // namespace detail

inline nlohmann::json construction_to_json(const ConstructionReport& r) {
  using nlohmann::json;
  json j;
  j["mode"] = to_string(r.chain.mode);
  j["phi"] = gauge_to_json(r.phi);
  j["psi"] = gauge_to_json(r.psi);
  j["C"] = r.C;
  j["depth"] = r.depth;
  j["precision"] = r.precision_bits;
  j["domination"] = {{"status", to_string(r.domination.status)},
                     {"log_C", detail::log_real_json(r.domination.log_C)},
                     {"depth_checked", r.domination.depth_checked}};
  json n = json::array(), v = json::array();
  if (r.chain.mode == ChainMode::exact) {
    for (const auto& x : r.chain.n) n.push_back(x.get_str());
    for (const auto& x : r.chain.v) v.push_back(x.get_str());
  } else {
    for (double l : r.chain.n_log2) n.push_back(l <= 1023 ? json(std::round(std::exp2(l))) : json(nullptr));
  }
  j["n"] = n;
  if (r.chain.mode == ChainMode::exact) j["v"] = v;
  j["v_log2"] = r.chain.v_log2;
  j["n_log2"] = r.chain.n_log2;
  j["T"] = r.schedule.times;
  j["k0"] = r.chain.k0;
  j["window"] = detail::window_json(r.window);
  j["incomplete"] = r.incomplete;
  j["checks"] = detail::checks_json(r.checks);
  j["warnings"] = r.warnings;
  return j;
}

struct VerificationSummary {
  std::vector<InvariantCheck> checks;
  bool ok() const { return all_passed(checks); }
};

inline nlohmann::json verification_to_json(const VerificationSummary& s) {
  return {{"ok", s.ok()}, {"checks", detail::checks_json(s.checks)}};
}

/// Re-derives targets, schedule and envelope from the stored gauges and
/// re-checks every chain invariant against the stored chain.
inline VerificationSummary verify_construction(const nlohmann::json& j) {
  using detail::require;
  const Gauge phi = gauge_from_json(require(j, "phi"));
  const Gauge psi = gauge_from_json(require(j, "psi"));
  const double C = detail::require_number(j, "C");
  const auto depth = static_cast<std::size_t>(detail::require_int(j, "depth"));
  const auto prec = static_cast<unsigned>(detail::require_int(j, "precision"));
  const auto& mode_j = require(j, "mode");
  if (!mode_j.is_string() || (mode_j != "exact" && mode_j != "approx"))
    throw InvalidParameter("field 'mode' must be \"exact\" or \"approx\"");
  const ChainMode mode = mode_j == "exact" ? ChainMode::exact : ChainMode::approx;

  auto as_array = [&](const char* key) -> const nlohmann::json& {
    const auto& a = require(j, key);
    if (!a.is_array()) throw InvalidParameter(std::string("field '") + key + "' must be an array");
    return a;
  };

  DivisibilityChain stored;
  stored.mode = mode;
  for (const auto& x : as_array("v_log2")) {
    if (!x.is_number()) throw InvalidParameter("v_log2 entries must be numbers");
    stored.v_log2.push_back(x.get<double>());
  }
  if (mode == ChainMode::exact) {
    auto parse_ints = [&](const char* key, std::vector<mpz_class>& out) {
      for (const auto& x : as_array(key)) {
        if (!x.is_string()) throw InvalidParameter(std::string(key) + " entries must be decimal strings");
        mpz_class z;
        if (z.set_str(x.get<std::string>(), 10) != 0) throw InvalidParameter(std::string("bad integer in ") + key);
        out.push_back(z);
      }
    };
    parse_ints("v", stored.v);
    parse_ints("n", stored.n);
  }
  stored.k0 = static_cast<std::size_t>(detail::require_int(j, "k0"));
  if (stored.v_log2.size() != depth || (mode == ChainMode::exact && stored.v.size() != depth))
    throw InvalidParameter("chain length does not match depth");

  VerificationSummary out;
  TargetSequences targets = targets_from_gauges(phi, psi, C, depth, prec);
  OscillationSchedule sched = oscillation_times(targets);
  Envelope envelope = build_envelope(targets, sched);

  InvariantCheck sched_chk{"schedule_reproduced"};
  std::vector<std::size_t> stored_T;
  for (const auto& x : as_array("T")) stored_T.push_back(x.get<std::size_t>());
  if (stored_T != sched.times) {
    sched_chk.status = CheckStatus::fail;
    sched_chk.detail = "stored oscillation times differ from recomputed ones";
  }
  out.checks.push_back(sched_chk);

  InvariantCheck k0_chk{"k0_consistent"};
  std::size_t k0 = 0;
  for (std::size_t k = 1; k <= depth && k0 == 0; ++k)
    if (mode == ChainMode::exact ? stored.v[k - 1] > 1 : stored.v_log2[k - 1] > 0.5) k0 = k;
  if (k0 != stored.k0) {
    k0_chk.status = CheckStatus::fail;
    k0_chk.detail = "stored k0 = " + std::to_string(stored.k0) + ", chain gives " + std::to_string(k0);
  }
  out.checks.push_back(k0_chk);

  InvariantCheck log_chk{"v_log2_consistent"};
  if (mode == ChainMode::exact) {
    for (std::size_t k = 1; k <= depth; ++k) {
      const double l = detail::log2_of(stored.v[k - 1]);
      if (std::fabs(l - stored.v_log2[k - 1]) > 1e-9 * (1.0 + std::fabs(l))) {
        log_chk.status = CheckStatus::fail;
        log_chk.detail = "v_log2 disagrees with v at k = " + std::to_string(k);
        break;
      }
    }
  } else {
    log_chk.status = CheckStatus::skipped;
    log_chk.detail = "approximate chain";
  }
  out.checks.push_back(log_chk);

  for (auto& c : check_chain_invariants(envelope, sched, stored)) out.checks.push_back(std::move(c));

  InvariantCheck repro{"chain_reproduced"};
  DivisibilityChain fresh = build_chain(envelope, prec, mode);
  const bool same = mode == ChainMode::exact ? fresh.v == stored.v : fresh.v_log2 == stored.v_log2;
  if (!same) {
    repro.status = CheckStatus::fail;
    repro.detail = "recomputed chain differs from the stored one";
  }
  out.checks.push_back(repro);

  InvariantCheck win{"window_bounds"};
  if (j.contains("window") && j["window"].is_object()) {
    const auto& wj = j["window"];
    const auto first = wj.value("first", std::size_t{1});
    const auto last = wj.value("last", depth);
    WindowSummary w = window_summary(envelope, sched, stored, first, last);
    constexpr double tol = 1e-9;
    if (w.has_T && !(w.a_over_v_max >= 1 - tol && w.a_over_v_max <= 2 + tol)) {
      win.status = CheckStatus::fail;
      win.detail = "window max of a/v outside [1, 2]";
    }
    if (w.has_T_plus_one && !(w.b_over_v_min >= 1 - tol && w.b_over_v_min <= 2 + tol)) {
      win.status = CheckStatus::fail;
      win.detail = "window min of b/v outside [1, 2]";
    }
    if (!w.has_T || !w.has_T_plus_one) {
      win.status = win.status == CheckStatus::fail ? win.status : CheckStatus::skipped;
      if (win.detail.empty()) win.detail = "window holds no complete oscillation time";
    }
  } else {
    win.status = CheckStatus::skipped;
    win.detail = "no window stored";
  }
  out.checks.push_back(win);
  return out;
}

}  // namespace cantor
