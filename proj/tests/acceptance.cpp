// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.
// BOOST_SHIFT_SEED overrides the seed (default 7).

#include <chrono>
#include <cstdlib>
#include <functional>
#include <limits>
#include <iostream>
#include <string>
#include <vector>

#include "bshift/harness.hpp"
#include "bshift/protocols.hpp"
#include "bshift/report.hpp"

using namespace bshift;
namespace pr = bshift::protocols;

namespace {

struct Criterion {
  std::string id;
  double time_limit_s;  // 0 means none
  std::function<std::vector<CheckResult>()> run;
};

// Folds sub-results into one line; a blown time limit fails the criterion.
CheckResult fold(const std::string& id, const std::vector<CheckResult>& parts, double seconds, double limit) {
  CheckResult out{id, true, std::numeric_limits<double>::infinity(), ""};
  for (const CheckResult& r : parts) {
    out.pass = out.pass && r.pass;
    out.margin = std::min(out.margin, r.margin);
    out.detail += (out.detail.empty() ? "" : " | ") + r.id + (r.pass ? ":PASS " : ":FAIL ") + r.detail;
  }
  out.detail += " | seconds=" + format_double(seconds);
  if (limit > 0) {
    out.detail += ",limit=" + format_double(limit);
    if (seconds > limit) out.pass = false;
  }
  return out;
}

}  // namespace

int main() {
  const std::uint64_t seed = std::getenv("BOOST_SHIFT_SEED") ? harness::default_seed() : 7;
  std::cout << "# acceptance seed=" << seed << '\n';

  const std::vector<Criterion> criteria{
      {"01-gtm-worst-case-exactness", 1.0,
       [&] {
         std::vector<CheckResult> v;
         for (double kappa : {4.0, 100.0, 1000.0}) v.push_back(pr::gtm_worst_case_exactness(kappa, 200, 1e-9, seed));
         return v;
       }},
      {"02-gtm-contraction", 30.0, [&] { return std::vector{pr::gtm_contraction_sweep(seed, 100, 500)}; }},
      {"03-nag-contraction", 30.0,
       [&] {
         return std::vector{pr::nag_contraction_sweep(seed, 100, 500), pr::nag_textbook_match(seed, 10, 100, 1e-12)};
       }},
      {"04-bs-point-saga-expected-contraction", 60.0,
       [&] { return std::vector{pr::bs_point_saga_enumerated(seed, 20, 200, 1e-9)}; }},
      {"05-bs-saga-expected-contraction", 60.0,
       [&] { return std::vector{pr::bs_saga_enumerated(seed, 20, 200, 1e-9)}; }},
      {"06-bs-svrg-epoch-contraction", 120.0,
       [&] {
         return std::vector{pr::bs_svrg_monte_carlo(SvrgChoice::kIll, seed, 1000),
                            pr::bs_svrg_monte_carlo(SvrgChoice::kNumerical, seed, 1000),
                            pr::bs_svrg_monte_carlo(SvrgChoice::kWell, seed, 1000)};
       }},
      {"07-parameter-constraints", 0.0,
       [] { return std::vector{pr::prop3_constraint_grid(), pr::prop4_constraint_grid()}; }},
      {"08-root-bounds", 0.0, [] { return std::vector{pr::point_saga_root_bounds(), pr::saga_root_bounds()}; }},
      {"09-rate-factor-ordering", 0.0, [] { return std::vector{pr::rate_table_ordering(1000)}; }},
      {"10-shifted-identities", 0.0, [&] { return pr::lemma_sweeps(seed, 10000); }},
      {"11-oracle-accounting", 0.0,
       [&] { return std::vector{pr::bs_svrg_epoch_accounting(seed), pr::bs_point_saga_prox_accounting(seed)}; }},
      {"12a-gtm-faster-than-nag", 0.0, [&] { return std::vector{pr::race_gtm_vs_nag(seed).result}; }},
      {"12b-bs-svrg-ill-faster-than-saga", 0.0,
       [&] { return std::vector{pr::race_bs_svrg_vs_saga(SvrgChoice::kIll, seed).result}; }},
      {"12c-bs-svrg-numerical-faster-than-saga", 0.0,
       [&] { return std::vector{pr::race_bs_svrg_vs_saga(SvrgChoice::kNumerical, seed).result}; }},
      {"12d-bs-point-saga-not-slower-than-point-saga", 0.0,
       [&] { return std::vector{pr::race_bs_point_saga_vs_point_saga(seed).result}; }},
      {"13-corrupted-alpha-detected", 0.0, [] { return std::vector{pr::gtm_corrupted_alpha_probe(100.0, 2.0, 50)}; }},
  };

  bool all = true;
  double race_seconds = 0.0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto parts = c.run();
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CheckResult r = fold(c.id, parts, s, c.time_limit_s);
    all = all && r.pass;
    std::cout << format_check(r) << std::endl;
    if (c.id.rfind("12", 0) == 0) race_seconds += s;
    if (c.id.rfind("12d", 0) == 0) {
      const CheckResult budget{"12-desk-scale-time-budget", race_seconds <= 180.0, 1.0 - race_seconds / 180.0,
                               "seconds=" + format_double(race_seconds) + ",limit=180"};
      all = all && budget.pass;
      std::cout << format_check(budget) << std::endl;
    }
  }
  std::cout << (all ? "# all criteria passed" : "# some criteria failed") << std::endl;
  return all ? 0 : 1;
}
