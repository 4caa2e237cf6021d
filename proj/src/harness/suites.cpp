#include "bshift/error.hpp"
#include "bshift/harness.hpp"
#include "bshift/protocols.hpp"

namespace bshift::harness {

namespace pr = bshift::protocols;

const std::vector<std::string>& suite_ids() {
  static const std::vector<std::string> ids{"lemmas",  "gtm",          "nag",    "bs-svrg",
                                            "bs-saga", "bs-point-saga", "params", "all"};
  return ids;
}

std::vector<CheckResult> run_suite(const std::string& suite, std::uint64_t seed, std::size_t trials) {
  std::vector<CheckResult> out;
  auto take = [&out](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  const bool all = suite == "all";
  bool known = all;

  if (all || suite == "lemmas") {
    known = true;
    take(pr::lemma_sweeps(seed, trials));
    take(pr::solver_step_identities(seed));
  }
  if (all || suite == "gtm") {
    known = true;
    for (double kappa : {4.0, 100.0, 1000.0}) out.push_back(pr::gtm_worst_case_exactness(kappa, 200, 1e-9, seed));
    out.push_back(pr::gtm_contraction_sweep(seed, 20, 500));
    out.push_back(pr::gtm_telescoped_bound(seed, 10, 500));
    out.push_back(pr::gtm_schedule_equivalences(seed, 100));
    out.push_back(pr::gtm_corrupted_alpha_probe(100.0, 2.0, 50));
  }
  if (all || suite == "nag") {
    known = true;
    out.push_back(pr::nag_contraction_sweep(seed, 20, 500));
    out.push_back(pr::nag_textbook_match(seed, 10, 100, 1e-12));
  }
  if (all || suite == "bs-svrg") {
    known = true;
    for (SvrgChoice c : {SvrgChoice::kIll, SvrgChoice::kNumerical, SvrgChoice::kWell})
      out.push_back(pr::bs_svrg_monte_carlo(c, seed, 1000));
    out.push_back(pr::bs_svrg_c1_identity());
    out.push_back(pr::bs_svrg_epoch_accounting(seed));
  }
  if (all || suite == "bs-saga") {
    known = true;
    out.push_back(pr::bs_saga_enumerated(seed, 5, 200, 1e-9));
  }
  if (all || suite == "bs-point-saga") {
    known = true;
    out.push_back(pr::bs_point_saga_enumerated(seed, 5, 200, 1e-9));
    out.push_back(pr::bs_point_saga_prox_accounting(seed));
  }
  if (all || suite == "params") {
    known = true;
    out.push_back(pr::prop3_constraint_grid());
    out.push_back(pr::prop4_constraint_grid());
    out.push_back(pr::point_saga_root_bounds());
    out.push_back(pr::saga_root_bounds());
    out.push_back(pr::rate_table_ordering(1000));
  }
  if (!known) throw Error(ErrorCode::kInvalidArgument, "unknown suite '" + suite + "'");
  return out;
}

}  // namespace bshift::harness
