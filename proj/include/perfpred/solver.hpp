#pragma once

#include <cstdint>
#include <vector>

#include "perfpred/dataset.hpp"
#include "perfpred/kernel.hpp"

namespace perfpred {

// Settings for the dual coordinate descent solver of
//   min_theta 1/2 ||theta||^2 + (C/n) sum_i max(0, 1 - y_i theta.phi(x_i)).
// The augmented bias removes the dual equality constraint, so the dual is a
// box-constrained QP with closed-form single-coordinate updates.
struct SolveSettings {
    double C = 1.0;
    double tol = 1e-6;     // stop when the max KKT violation falls below this
    int max_passes = 2000;
    bool shrink = false;   // enable the active-set shrinking heuristic
    bool record_history = false;  // keep per-pass primal/dual values
};

struct PassStats {
    double primal = 0.0;
    double dual = 0.0;
};

struct SolveReport {
    KernelModel model;       // support = rows with alpha > 0, coeffs = alpha*y
    Eigen::VectorXd alpha;   // full-length dual variables (for warm starts)
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;        // primal - dual at return
    int passes = 0;
    int n_support = 0;
    bool converged = false;  // KKT tolerance reached before max_passes
    std::vector<PassStats> history;
};

// Exact minimizer of the objective above. The coordinate visit order is a
// seeded permutation, reshuffled every pass, so results are reproducible.
// warm_alpha, when given, must have length n and is clipped into the box.
SolveReport solve(const Dataset& data, const KernelSpec& spec,
                  const SolveSettings& settings, std::uint64_t seed,
                  const Eigen::VectorXd* warm_alpha = nullptr);

// 1/2 ||theta||^2 + (C/n) sum_i hinge_i evaluated for an arbitrary model.
double primal_objective(const Dataset& data, const KernelModel& model, double C);

// Norm of theta - (C/n) sum_{y_i f(x_i) < 1} y_i phi(x_i), evaluated through
// Gram algebra on the span of (support, data). Near zero at an optimum with
// no point exactly on the margin.
double subgradient_norm(const Dataset& data, const KernelModel& model, double C);

}  // namespace perfpred
