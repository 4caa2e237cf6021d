#pragma once

// Verification protocols shared by `verify` suites and the acceptance runner.
// Each returns one aggregated CheckResult (worst margin over everything it ran).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bshift/lyapunov.hpp"

namespace bshift::protocols {

/// ||z_K - x*||^2 against (1 - 1/sqrt(kappa))^{2K} ||z_0 - x*||^2 on the d = 2
/// diagonal quadratic, every K <= steps.
CheckResult gtm_worst_case_exactness(double kappa, std::size_t steps, double rel_tol, std::uint64_t seed);

/// Constant-choice G-TM contraction over random logistic and diagonal-quadratic
/// instances (half each). alpha_scale != 1 runs a corrupted alpha against the
/// nominal guarantee.
CheckResult gtm_contraction_sweep(std::uint64_t seed, std::size_t instances, std::size_t steps);
CheckResult gtm_corrupted_alpha_probe(double kappa, double alpha_scale, std::size_t steps);

/// Telescoped bound (mu/2)||z_K - x*||^2 <= (1 - 1/sqrt(kappa))^{2K} C_0 for K <= steps.
CheckResult gtm_telescoped_bound(std::uint64_t seed, std::size_t instances, std::size_t steps);

/// G-TM with the NAG schedule reproduces NAG; TM schedule differs from the
/// constant choice only at k = 0.
CheckResult gtm_schedule_equivalences(std::uint64_t seed, std::size_t steps);

CheckResult nag_contraction_sweep(std::uint64_t seed, std::size_t instances, std::size_t steps);
CheckResult nag_textbook_match(std::uint64_t seed, std::size_t instances, std::size_t steps, double tol);

/// Exact E_i[T_{k+1}] along sampled trajectories on random ridge instances.
CheckResult bs_point_saga_enumerated(std::uint64_t seed, std::size_t instances, std::size_t steps, double rel_slack);
CheckResult bs_saga_enumerated(std::uint64_t seed, std::size_t instances, std::size_t steps, double rel_slack);

/// Per-epoch Monte Carlo check on synthetic logistic (n = 20, m = 40).
/// choice: ill (mu = 1e-3), numerical (mu = 1e-3) or well (mu = 0.05).
CheckResult bs_svrg_monte_carlo(SvrgChoice choice, std::uint64_t seed, std::size_t replications);

/// c1 closed form against its defining equality, and c1 range, over a grid.
CheckResult bs_svrg_c1_identity();

CheckResult prop3_constraint_grid();
CheckResult prop4_constraint_grid();
CheckResult point_saga_root_bounds();
CheckResult saga_root_bounds();
CheckResult rate_table_ordering(std::size_t n);

/// Identity sweeps on logistic and ridge instances; ids are the concept names.
std::vector<CheckResult> lemma_sweeps(std::uint64_t seed, std::size_t trials);
/// Mirror identity and shifted-estimator relation at every z-step of actual
/// NAG, G-TM, BS-SVRG and BS-SAGA runs; firm non-expansiveness at every
/// BS-Point-SAGA step.
std::vector<CheckResult> solver_step_identities(std::uint64_t seed);

CheckResult bs_svrg_epoch_accounting(std::uint64_t seed);
CheckResult bs_point_saga_prox_accounting(std::uint64_t seed);

/// Desk-scale comparisons. Each detail reports the cost of both methods.
struct RaceOutcome {
  CheckResult result;
  double ours = 0.0;
  double baseline = 0.0;
};
RaceOutcome race_gtm_vs_nag(std::uint64_t seed);
RaceOutcome race_bs_svrg_vs_saga(SvrgChoice choice, std::uint64_t seed);
RaceOutcome race_bs_point_saga_vs_point_saga(std::uint64_t seed);

}  // namespace bshift::protocols
