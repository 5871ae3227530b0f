#pragma once

#include <vector>

#include "perfpred/dataset.hpp"
#include "perfpred/kernel.hpp"
#include "perfpred/rrm.hpp"

namespace perfpred {

// Classification sign convention used everywhere: sign(0) = +1.
inline double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

// Fraction of samples with sign(f(x_i)) == y_i.
double accuracy(const KernelModel& model, const Dataset& data);
double accuracy_of_scores(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

// Cosine similarity of two stacked (weights, bias) vectors.
double consistency_linear(const Eigen::VectorXd& v1, const Eigen::VectorXd& v2);

struct Summary {
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    double mean_consistency = 0.0;
    double std_consistency = 0.0;
    int trials = 0;
    int burn_in = 0;
};

// Mean over all (trial, t > burn_in) cells; the std is the population std of
// the per-trial means. Every trace must extend past the burn-in.
Summary summarize(const std::vector<RrmTrace>& traces, int burn_in);

}  // namespace perfpred
