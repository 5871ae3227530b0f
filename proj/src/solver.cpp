#include "perfpred/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "perfpred/errors.hpp"
#include "perfpred/rng.hpp"

namespace perfpred {

namespace {

double primal_from_scores(const Eigen::VectorXd& beta, const Eigen::VectorXd& o,
                          const Eigen::VectorXd& y, double C) {
    const int n = static_cast<int>(y.size());
    double hinge_sum = 0.0;
    for (int i = 0; i < n; ++i) hinge_sum += std::max(0.0, 1.0 - y[i] * o[i]);
    return 0.5 * beta.dot(o) + (C / n) * hinge_sum;
}

double dual_from_scores(const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta,
                        const Eigen::VectorXd& o) {
    return alpha.sum() - 0.5 * beta.dot(o);
}

}  // namespace

SolveReport solve(const Dataset& data, const KernelSpec& spec,
                  const SolveSettings& settings, std::uint64_t seed,
                  const Eigen::VectorXd* warm_alpha) {
    validate(data);
    if (!(settings.C > 0.0)) throw ArgumentError("C must be positive");
    if (!(settings.tol > 0.0)) throw ArgumentError("tol must be positive");
    if (settings.max_passes < 1) throw ArgumentError("max_passes must be >= 1");

    const int n = data.n();
    const double U = settings.C / n;
    const Eigen::MatrixXd X = augment(data);
    const Eigen::VectorXd& y = data.labels;

    Eigen::MatrixXd K = gram(spec, X, X);
    if (!K.allFinite()) throw NumericError("non-finite kernel value in Gram matrix");
    const Eigen::VectorXd Kdiag = K.diagonal();

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    if (warm_alpha != nullptr) {
        if (warm_alpha->size() != n)
            throw ArgumentError("warm-start alpha length does not match dataset");
        alpha = warm_alpha->cwiseMax(0.0).cwiseMin(U);
    }
    Eigen::VectorXd beta = alpha.cwiseProduct(y);
    Eigen::VectorXd o = K * beta;  // o_i = f(x_i)

    auto engine = make_engine(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<bool> active(n, true);
    int active_count = n;

    SolveReport report;
    bool converged = false;
    int pass = 0;
    double prev_max_violation = std::numeric_limits<double>::infinity();

    while (pass < settings.max_passes) {
        ++pass;
        std::shuffle(order.begin(), order.end(), engine);
        double max_violation = 0.0;
        const double shrink_threshold = std::max(prev_max_violation, settings.tol);

        for (int idx : order) {
            if (!active[idx]) continue;
            const double g = 1.0 - y[idx] * o[idx];  // dual ascent gradient
            double violation;
            if (alpha[idx] <= 0.0) {
                violation = std::max(g, 0.0);
                if (settings.shrink && g < -shrink_threshold) {
                    active[idx] = false;
                    --active_count;
                    continue;
                }
            } else if (alpha[idx] >= U) {
                violation = std::max(-g, 0.0);
                if (settings.shrink && g > shrink_threshold) {
                    active[idx] = false;
                    --active_count;
                    continue;
                }
            } else {
                violation = std::abs(g);
            }
            max_violation = std::max(max_violation, violation);
            if (violation <= 0.0) continue;

            double alpha_new;
            if (Kdiag[idx] > 0.0) {
                alpha_new = std::clamp(alpha[idx] + g / Kdiag[idx], 0.0, U);
            } else {
                // phi(x_idx) has zero norm: the dual is linear in this variable.
                alpha_new = g > 0.0 ? U : 0.0;
            }
            const double delta_beta = (alpha_new - alpha[idx]) * y[idx];
            if (delta_beta != 0.0) {
                alpha[idx] = alpha_new;
                beta[idx] = alpha_new * y[idx];
                o.noalias() += delta_beta * K.col(idx);
            }
        }
        prev_max_violation = max_violation;

        if (settings.record_history) {
            report.history.push_back(
                {primal_from_scores(beta, o, y, settings.C),
                 dual_from_scores(alpha, beta, o)});
        }

        if (max_violation <= settings.tol) {
            if (active_count == n) {
                converged = true;
                break;
            }
            // Optimal on the active set: bring everything back for a full check.
            std::fill(active.begin(), active.end(), true);
            active_count = n;
            prev_max_violation = std::numeric_limits<double>::infinity();
        }
    }

    // Refresh scores once to shed accumulated update drift.
    o.noalias() = K * beta;

    report.alpha = alpha;
    report.primal = primal_from_scores(beta, o, y, settings.C);
    report.dual = dual_from_scores(alpha, beta, o);
    report.gap = report.primal - report.dual;
    report.passes = pass;
    report.converged = converged;

    int m = 0;
    for (int i = 0; i < n; ++i)
        if (alpha[i] > 0.0) ++m;
    report.n_support = m;
    report.model.spec = spec;
    report.model.support.resize(m, X.cols());
    report.model.coeffs.resize(m);
    int w = 0;
    for (int i = 0; i < n; ++i) {
        if (alpha[i] > 0.0) {
            report.model.support.row(w) = X.row(i);
            report.model.coeffs[w] = beta[i];
            ++w;
        }
    }
    return report;
}

double primal_objective(const Dataset& data, const KernelModel& model, double C) {
    const Eigen::MatrixXd X = augment(data);
    const Eigen::VectorXd f = predict(model, X);
    double hinge_sum = 0.0;
    for (int i = 0; i < data.n(); ++i)
        hinge_sum += std::max(0.0, 1.0 - data.labels[i] * f[i]);
    return 0.5 * model_dot(model, model) + (C / data.n()) * hinge_sum;
}

double subgradient_norm(const Dataset& data, const KernelModel& model, double C) {
    const Eigen::MatrixXd X = augment(data);
    const Eigen::VectorXd f = predict(model, X);
    const int n = data.n();

    std::vector<int> violators;
    for (int i = 0; i < n; ++i)
        if (data.labels[i] * f[i] < 1.0) violators.push_back(i);

    // theta - (C/n) sum over violators of y_i phi(x_i), expressed on the
    // stacked span of (support, violator points).
    const int m = model.size();
    const int v = static_cast<int>(violators.size());
    KernelModel sub;
    sub.spec = model.spec;
    sub.support.resize(m + v, X.cols());
    sub.coeffs.resize(m + v);
    if (m > 0) {
        sub.support.topRows(m) = model.support;
        sub.coeffs.head(m) = model.coeffs;
    }
    for (int j = 0; j < v; ++j) {
        sub.support.row(m + j) = X.row(violators[j]);
        sub.coeffs[m + j] = -(C / n) * data.labels[violators[j]];
    }
    if (sub.size() == 0) return 0.0;
    return model_norm(sub);
}

}  // namespace perfpred
