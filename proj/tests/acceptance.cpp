// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cantor/cantor.hpp"

using namespace cantor;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool check_passed(const std::vector<InvariantCheck>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c.status == CheckStatus::pass;
  return false;
}

// 1. Hand trace a_k = k, b_k = k^2.
Outcome hand_trace() {
  Outcome o;
  const auto t0 = Clock::now();
  auto t = targets_from_integers([](std::size_t k) { return mpz_class(static_cast<unsigned long>(k)); },
                                 [](std::size_t k) { return mpz_class(static_cast<unsigned long>(k * k)); }, 150);
  auto sched = oscillation_times(t);
  auto chain = build_chain(build_envelope(t, sched));
  const double secs = seconds_since(t0);
  const bool times_ok = sched.times == std::vector<std::size_t>{2, 10, 122};
  const bool v_ok = chain.v.size() >= 11 && chain.v[10] == 120;
  o.pass = times_ok && v_ok && secs < 1.0;
  std::ostringstream os;
  os << "T = (";
  for (std::size_t i = 0; i < sched.times.size(); ++i) os << (i ? ", " : "") << sched.times[i];
  os << "), v_11 = " << (chain.v.size() >= 11 ? chain.v[10].get_str() : "?") << ", " << secs << " s";
  o.detail = os.str();
  return o;
}

struct ConstructionCase {
  Gauge phi, psi;
  std::size_t depth;
};

// 2. Chain invariants over randomized power pairs and iterated pairs.
Outcome construction_invariants(std::vector<CompactProduct>& built) {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> alpha(0.2, 3.0);
  std::uniform_real_distribution<double> scale(1.0, 4.0);
  std::vector<ConstructionCase> cases;
  while (cases.size() < 60) {
    const double a = alpha(rng);
    std::uniform_real_distribution<double> beta(a, 3.0);
    const Gauge base = Gauge::power(beta(rng));
    Gauge psi = base;
    switch (rng() % 3) {
      case 0: psi = Gauge::half(base); break;
      case 1: psi = Gauge::scaled(base, scale(rng)); break;
      default: psi = Gauge::scaled(Gauge::half(base), scale(rng)); break;
    }
    cases.push_back({Gauge::power(a), psi, 500});
  }
  const Gauge it = Gauge::iterated(2, 1, 1);
  for (std::size_t d : {16, 17, 18}) cases.push_back({it, Gauge::half(it), d});
  cases.push_back({it, Gauge::scaled(Gauge::half(it), 3), 17});

  const auto t0 = Clock::now();
  std::size_t failures = 0, windows_checked = 0, skipped = 0;
  double a_max_lo = 3, a_max_hi = 0, b_min_lo = 3, b_min_hi = 0;
  std::string first_failure;
  for (const auto& c : cases) {
    std::optional<ConstructionReport> built_report;
    try {
      built_report = construct_prescribed_product(c.phi, c.psi, c.depth);
    } catch (const DominationViolated&) {
      ++skipped;
      continue;
    }
    const ConstructionReport& r = *built_report;
    bool ok = true;
    for (const char* name : {"chain_starts_at_one", "divisibility", "branching_consistent", "sandwich", "ratio_bounds",
                             "subsequence_attainment", "envelope"})
      ok = ok && check_passed(r.checks, name);
    if (!r.incomplete) {
      ++windows_checked;
      const auto& w = r.window;
      ok = ok && w.a_over_v_max >= 1 - 1e-9 && w.a_over_v_max <= 2 + 1e-9;
      ok = ok && w.b_over_v_min >= 1 - 1e-9 && w.b_over_v_min <= 2 + 1e-9;
      a_max_lo = std::min(a_max_lo, w.a_over_v_max);
      a_max_hi = std::max(a_max_hi, w.a_over_v_max);
      b_min_lo = std::min(b_min_lo, w.b_over_v_min);
      b_min_hi = std::max(b_min_hi, w.b_over_v_min);
    }
    if (!ok) {
      ++failures;
      if (first_failure.empty()) first_failure = c.phi.to_string() + " / " + c.psi.to_string();
    }
    if (c.depth == 500 && built.size() < 8) built.push_back(CompactProduct::from_chain(r.chain));
  }
  const double secs = seconds_since(t0);
  const std::size_t run = cases.size() - skipped;
  o.pass = failures == 0 && run >= 54 && secs < 60;
  std::ostringstream os;
  os << run << " constructions (" << skipped << " rejected by domination), " << failures << " failing, "
     << windows_checked << " complete windows, a/v max in [" << a_max_lo << ", " << a_max_hi << "], b/v min in ["
     << b_min_lo << ", " << b_min_hi << "], " << secs << " s";
  if (!first_failure.empty()) os << ", first failure " << first_failure;
  o.detail = os.str();
  return o;
}

// 3. DP against exhaustive oracles on every small product.
Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t compared = 0, mismatches = 0;
  const Gauge gauges[] = {Gauge::power(0.5), Gauge::power(1), Gauge::power(2)};
  std::function<void(std::vector<unsigned long>&)> visit = [&](std::vector<unsigned long>& f) {
    if (!f.empty()) {
      auto K = CompactProduct::from_factors(f);
      for (const Gauge& g : gauges)
        for (std::size_t D = 0; D <= K.depth(); ++D) {
          if (K.v(D) > detail::kOracleLeafCap) continue;
          for (std::size_t e = 0; e <= D; ++e) {
            const TruncationWindow w{e, D};
            if (!(*hausdorff_premeasure(K, g, w).exact == cover_oracle(K, g, w))) ++mismatches;
            if (!(*packing_premeasure(K, g, w).exact == pack_oracle(K, g, w))) ++mismatches;
            compared += 2;
          }
        }
    }
    if (f.size() == 3) return;
    for (unsigned long n = 1; n <= 3; ++n) {
      f.push_back(n);
      visit(f);
      f.pop_back();
    }
  };
  std::vector<unsigned long> f;
  visit(f);
  auto K = CompactProduct::from_factors({2, 2});
  const bool worked = *hausdorff_premeasure(K, Gauge::power(2), {1, 2}).exact == DyadicSurd(mpq_class(1, 16)) &&
                      *packing_premeasure(K, Gauge::power(2), {1, 2}).exact == DyadicSurd(mpq_class(1, 2)) &&
                      cover_oracle(K, Gauge::power(2), {1, 2}) == DyadicSurd(mpq_class(1, 16)) &&
                      pack_oracle(K, Gauge::power(2), {1, 2}) == DyadicSurd(mpq_class(1, 2));
  const double secs = seconds_since(t0);
  o.pass = mismatches == 0 && worked && secs < 300;
  std::ostringstream os;
  os << compared << " exact comparisons, " << mismatches << " mismatches, worked values H = 1/16, P = 1/2 "
     << (worked ? "reproduced" : "NOT reproduced") << ", " << secs << " s";
  o.detail = os.str();
  return o;
}

// 4. n_k = 2 with phi(eps) = eps: premeasures against the density streams.
Outcome binary_identity() {
  Outcome o;
  const std::size_t depth = 40;
  auto K = CompactProduct::constant(2, depth);
  const Gauge g = Gauge::power(1);
  std::size_t windows = 0, bad = 0;
  for (std::size_t e = 0; e <= depth; ++e)
    for (std::size_t D = e; D <= depth; ++D) {
      ++windows;
      if (!(*hausdorff_premeasure(K, g, {e, D}).exact == DyadicSurd(mpq_class(1, 2)))) ++bad;
      if (!(*packing_premeasure(K, g, {e, D}).exact == DyadicSurd(1))) ++bad;
    }
  auto m = measure_via_density(K, g, g, 1, depth);
  const bool density_ok = compare(m.hausdorff.value_log, -LogReal::ln2(kDefaultPrecision)) == Cmp3::indeterminate && m.packing.value_log.contains(0.0) &&
                          !m.hausdorff.degenerate() && !m.packing.degenerate();
  o.pass = bad == 0 && density_ok;
  std::ostringstream os;
  os << windows << " windows, " << bad << " mismatches; 1/limsup upper = " << std::exp(m.hausdorff.value_log.value())
     << ", 1/liminf lower = " << std::exp(m.packing.value_log.value());
  o.detail = os.str();
  return o;
}

struct ScaleCase {
  double alpha, beta;
  CompactProduct K;
  ScaleEstimate h, p;
  LocalScaleEstimate local;
};

// 5. Scale recovery on constructed products.
Outcome scale_recovery(std::vector<ScaleCase>& cases) {
  Outcome o;
  std::ostringstream os;
  const SearchInterval s;
  for (auto [a, b] : {std::pair{0.5, 1.5}, std::pair{1.0, 1.0}, std::pair{0.3, 2.0}}) {
    const auto t0 = Clock::now();
    auto r = construct_prescribed_product(Gauge::power(a), Gauge::power(b), 4000);
    ScaleCase c{a, b, CompactProduct::from_chain(r.chain), {}, {}, {}};
    c.h = estimate_hausdorff_scale(c.K, ScalingFamily::power(), s);
    c.p = estimate_packing_scale(c.K, ScalingFamily::power(), s);
    c.local = estimate_local_scales(c.K, ScalingFamily::power(), s);
    const double secs = seconds_since(t0);
    const bool ok = c.h.contains(a) && c.h.width() <= s.tol && c.p.contains(b) && c.p.width() <= s.tol &&
                    std::fabs(c.local.lower.value - a) <= 0.05 && std::fabs(c.local.upper.value - b) <= 0.05 &&
                    secs < 120;
    o.pass = o.pass && ok;
    os << (cases.empty() ? "" : "; ") << "(" << a << ", " << b << "): H [" << c.h.lo << ", " << c.h.hi << "], P [" << c.p.lo << ", " << c.p.hi
       << "], local (" << c.local.lower.value << ", " << c.local.upper.value << "), " << secs << " s"
       << (ok ? "" : " FAIL");
    cases.push_back(std::move(c));
  }
  o.detail = os.str();
  return o;
}

// 6. Distortion bounds of the embedding.
Outcome embedding_bounds() {
  Outcome o;
  const auto t0 = Clock::now();
  auto K = CompactProduct::constant(4, 48);
  auto rep = verify_distortion_bounds(random_pairs(K, 1000, 12345, 48, 40), 48);
  const double dev = rep.max_deviation_from(20);
  const double secs = seconds_since(t0);
  o.pass = rep.pairs == 1000 && rep.violations == 0 && dev <= 0.35 && secs < 10;
  std::ostringstream os;
  os << rep.pairs << " pairs, " << rep.violations << " violations, ratio in [" << rep.ratio_min << ", "
     << rep.ratio_max << "], max |ratio - 1| for k0 >= 20 = " << dev << ", " << secs << " s";
  o.detail = os.str();
  return o;
}

// 7. Order relations on every constructed example.
Outcome order_relations(const std::vector<ScaleCase>& cases, const std::vector<CompactProduct>& extra) {
  Outcome o;
  std::size_t checks = 0, violated = 0, strict = 0;
  auto record = [&](const std::vector<OrderCheck>& cs) {
    for (const auto& c : cs) {
      ++checks;
      if (!c.holds) ++violated;
      if (c.detail == "strict") ++strict;
    }
  };
  for (const auto& c : cases) record(check_scale_order(c.h, c.p, c.local));
  const SearchInterval s;
  for (const auto& K : extra) {
    auto h = estimate_hausdorff_scale(K, ScalingFamily::power(), s);
    auto p = estimate_packing_scale(K, ScalingFamily::power(), s);
    record(check_scale_order(h, p, estimate_local_scales(K, ScalingFamily::power(), s)));
  }
  o.pass = violated == 0 && checks > 0;
  std::ostringstream os;
  os << (cases.size() + extra.size()) << " products, " << checks << " order checks, " << violated << " violated, "
     << strict << " strict";
  o.detail = os.str();
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* what, const Outcome& o) {
    std::printf("criterion %d %-28s %s  %s\n", n, what, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };
  std::vector<CompactProduct> built;
  std::vector<ScaleCase> scale_cases;
  report(1, "hand trace", hand_trace());
  report(2, "construction invariants", construction_invariants(built));
  report(3, "oracle equivalence", oracle_equivalence());
  report(4, "binary product identity", binary_identity());
  report(5, "scale recovery", scale_recovery(scale_cases));
  report(6, "embedding bounds", embedding_bounds());
  report(7, "order relations", order_relations(scale_cases, built));
  std::printf("%d of 7 criteria passed\n", 7 - failed);
  return failed == 0 ? 0 : 1;
}
