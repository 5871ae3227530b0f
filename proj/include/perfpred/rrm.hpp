#pragma once

#include <cstdint>
#include <vector>

#include "perfpred/dataset.hpp"
#include "perfpred/kernel.hpp"
#include "perfpred/shift.hpp"
#include "perfpred/solver.hpp"

namespace perfpred {

// Which model filters the margin violators entering the step sensitivity
// estimate: the previously deployed model (default) or the current one.
enum class ViolatorFilter { Previous, Current };

struct RrmSettings {
    double alpha = 0.49;   // must lie in (0, 0.5)
    int T_max = 100;
    int trials = 10;       // used by the experiment runner, not by one run
    int burn_in = 20;
    double C_init = 1.0;
    double convergence_consistency = 1.0 - 1e-6;
    std::uint64_t seed = 0;
    ViolatorFilter violator_filter = ViolatorFilter::Previous;
};

struct RrmRecord {
    int t = 0;
    double epsilon = 0.0;
    double epsilon_bar = 0.0;
    double C = 0.0;
    double accuracy = 0.0;
    double consistency = 0.0;  // 0 at t = 1 (no predecessor model)
    double model_gap = 0.0;    // ||theta_t - theta_{t-1}||, vs zero model at t = 1
    double dual_gap = 0.0;     // solver certificate (duality gap)
    int n = 0;
    // Not serialized: kept for analysis and the contraction audit.
    double theta_norm = 0.0;
    double sigma = 0.0;  // std of the per-violator error terms in the step estimate
    bool solver_converged = true;
};

struct RrmTrace {
    std::vector<RrmRecord> rows;
    KernelModel final_model;
    bool aborted = false;       // estimation failure mid-run leaves a partial trace
    std::string abort_reason;
};

// Relative threshold below which two consecutive models count as identical
// (the sensitivity denominator would vanish).
inline double gap_threshold(double prev_norm) {
    return 1e-8 * (prev_norm > 1.0 ? prev_norm : 1.0);
}

// First-iteration sensitivity: unfiltered means of y_i f(x_i) over both
// datasets, divided by ||theta1||^2.
double estimate_epsilon_initial(const Dataset& d0, const Dataset& d1,
                                const KernelModel& theta1);

// Step sensitivity: per-side means over margin violators (y_i f_filter < 1)
// of y_i (f_prev - f_cur)(x_i), divided by ||theta_prev - theta_cur||^2.
// An empty violator set on one side contributes a zero mean.
double estimate_epsilon_step(const Dataset& d_prev, const Dataset& d_cur,
                             const KernelModel& theta_prev,
                             const KernelModel& theta_cur,
                             ViolatorFilter filter = ViolatorFilter::Previous);

// Same estimate plus the std of the individual violator terms measured with
// the unit direction model (pooled over both sides).
struct EpsilonStepStats {
    double epsilon = 0.0;
    double sigma = 0.0;
};
EpsilonStepStats estimate_epsilon_step_stats(const Dataset& d_prev,
                                             const Dataset& d_cur,
                                             const KernelModel& theta_prev,
                                             const KernelModel& theta_cur,
                                             ViolatorFilter filter);

// The adaptive retraining loop: iteration 1 trains on data0 with C_init and
// deploys; every later iteration sets C = alpha / mean(epsilon so far),
// trains on the previously induced dataset, deploys, and re-estimates the
// sensitivity. Stops at T_max or once consecutive models agree to the
// convergence thresholds. Feature-map candidate noise is frozen per run;
// label-flip noise is redrawn every iteration.
RrmTrace run_rrm(const Dataset& data0, const KernelSpec& spec, const MapSpec& map,
                 const RrmSettings& settings, const SolveSettings& solver);

struct ContractionAudit {
    double max_ratio = 0.0;   // max successor-gap ratio over all eligible steps
    bool satisfied = false;   // post-burn-in ratios all <= 1
};

// Successor-gap contraction check over a finished trace. Ratios
// gap_{t+1}/gap_t are formed only where gap_t exceeds the convergence
// threshold. Requires at least 3 iterations.
ContractionAudit contraction_audit(const RrmTrace& trace, int burn_in = 20);

}  // namespace perfpred
