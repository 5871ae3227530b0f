#pragma once

#include <cstdint>

#include "perfpred/dataset.hpp"
#include "perfpred/rrm.hpp"
#include "perfpred/shift.hpp"

namespace perfpred {

struct LinearModel {
    Eigen::VectorXd weights;  // raw feature width
    double bias = 0.0;

    Eigen::VectorXd stacked() const;  // (weights, bias)
};

struct LrSettings {
    double l2 = 1e-3;
    double lr = 0.1;
    int max_iters = 2000;
    double tol = 1e-8;  // gradient-norm stop rule for lr_fit
};

// Mean logistic loss plus (l2/2)||w||^2 (bias unregularized) and its
// gradient stacked as (dw, db).
double lr_loss(const LinearModel& model, const Dataset& data, double l2);
Eigen::VectorXd lr_gradient(const LinearModel& model, const Dataset& data, double l2);

// Full-batch gradient descent from the zero model until the gradient norm
// drops below tol or max_iters is reached.
LinearModel lr_fit(const Dataset& data, double l2, double lr, int max_iters,
                   double tol);

// One exact full-batch gradient step.
LinearModel lr_gradient_step(const LinearModel& model, const Dataset& data,
                             double l2, double lr);

RawScorer make_linear_scorer(const LinearModel& model);

// Repeated retraining (full refit each iteration) of the logistic baseline
// under the given map. Shares the trace format; the sensitivity and C
// columns are zero and dual_gap carries the final gradient norm.
RrmTrace run_rrm_lr(const Dataset& data0, const MapSpec& map,
                    const RrmSettings& settings, const LrSettings& lr_settings);

// Repeated single-gradient-step variant (the model carries over between
// deployments).
RrmTrace run_rgd_lr(const Dataset& data0, const MapSpec& map,
                    const RrmSettings& settings, const LrSettings& lr_settings);

}  // namespace perfpred
