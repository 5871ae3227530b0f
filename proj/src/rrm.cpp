#include "perfpred/rrm.hpp"

#include <cmath>

#include "perfpred/errors.hpp"
#include "perfpred/metrics.hpp"
#include "perfpred/rng.hpp"

namespace perfpred {

namespace {

constexpr std::uint64_t kFeatureSalt = 0xFEA7;
constexpr std::uint64_t kLabelSalt = 0x1AB5;
constexpr std::uint64_t kSolverSalt = 0x501;

struct SideMean {
    double mean = 0.0;
    int count = 0;
};

// Mean of y_i (f_prev - f_cur) over the margin violators of f_filter;
// also accumulates the unit-direction terms for the sigma estimate.
SideMean violator_mean(const Dataset& data, const Eigen::VectorXd& f_filter,
                       const Eigen::VectorXd& f_prev, const Eigen::VectorXd& f_cur,
                       double gap, std::vector<double>* xi_out) {
    SideMean out;
    double sum = 0.0;
    for (int i = 0; i < data.n(); ++i) {
        if (data.labels[i] * f_filter[i] < 1.0) {
            const double diff = data.labels[i] * (f_prev[i] - f_cur[i]);
            sum += diff;
            ++out.count;
            if (xi_out != nullptr) xi_out->push_back(diff / gap);
        }
    }
    if (out.count > 0) out.mean = sum / out.count;
    return out;
}

}  // namespace

double estimate_epsilon_initial(const Dataset& d0, const Dataset& d1,
                                const KernelModel& theta1) {
    validate(d0);
    validate(d1);
    const double norm = model_norm(theta1);
    if (norm <= 0.0)
        throw EstimationError("initial sensitivity undefined for a zero-norm model");
    const Eigen::VectorXd f0 = predict(theta1, augment(d0));
    const Eigen::VectorXd f1 = predict(theta1, augment(d1));
    const double m0 = d0.labels.dot(f0) / d0.n();
    const double m1 = d1.labels.dot(f1) / d1.n();
    return std::abs(m0 - m1) / (norm * norm);
}

EpsilonStepStats estimate_epsilon_step_stats(const Dataset& d_prev,
                                             const Dataset& d_cur,
                                             const KernelModel& theta_prev,
                                             const KernelModel& theta_cur,
                                             ViolatorFilter filter) {
    validate(d_prev);
    validate(d_cur);
    const double gap = model_diff_norm(theta_prev, theta_cur);
    if (gap <= gap_threshold(model_norm(theta_prev)))
        throw EstimationError("model gap below threshold; consecutive models agree");

    const Eigen::MatrixXd Xp = augment(d_prev);
    const Eigen::MatrixXd Xc = augment(d_cur);

    const Eigen::VectorXd fp_prev = predict(theta_prev, Xp);
    const Eigen::VectorXd fp_cur = predict(theta_cur, Xp);
    const Eigen::VectorXd fp_filter =
        filter == ViolatorFilter::Previous ? fp_prev : fp_cur;

    const Eigen::VectorXd fc_prev = predict(theta_prev, Xc);
    const Eigen::VectorXd fc_cur = predict(theta_cur, Xc);
    const Eigen::VectorXd fc_filter =
        filter == ViolatorFilter::Previous ? fc_prev : fc_cur;

    std::vector<double> xi;
    const SideMean prev_side = violator_mean(d_prev, fp_filter, fp_prev, fp_cur, gap, &xi);
    const SideMean cur_side = violator_mean(d_cur, fc_filter, fc_prev, fc_cur, gap, &xi);

    EpsilonStepStats stats;
    stats.epsilon = std::abs(prev_side.mean - cur_side.mean) / (gap * gap);
    if (!xi.empty()) {
        double mean = 0.0;
        for (double v : xi) mean += v;
        mean /= xi.size();
        double var = 0.0;
        for (double v : xi) var += (v - mean) * (v - mean);
        stats.sigma = std::sqrt(var / xi.size());
    }
    return stats;
}

double estimate_epsilon_step(const Dataset& d_prev, const Dataset& d_cur,
                             const KernelModel& theta_prev,
                             const KernelModel& theta_cur, ViolatorFilter filter) {
    return estimate_epsilon_step_stats(d_prev, d_cur, theta_prev, theta_cur, filter)
        .epsilon;
}

RrmTrace run_rrm(const Dataset& data0, const KernelSpec& spec, const MapSpec& map,
                 const RrmSettings& settings, const SolveSettings& solver) {
    validate(data0);
    if (!(settings.alpha > 0.0 && settings.alpha < 0.5))
        throw ArgumentError("alpha must lie in (0, 0.5)");
    if (settings.T_max < 1) throw ArgumentError("T_max must be >= 1");
    if (settings.burn_in < 0 || settings.burn_in >= settings.T_max)
        throw ArgumentError("burn_in must satisfy 0 <= burn_in < T_max");
    if (!(settings.C_init > 0.0)) throw ArgumentError("C_init must be positive");
    if (map.kind == MapKind::Bankruptcy && !map.mask.has_value())
        throw ArgumentError("bankruptcy map requires a performative mask");

    const std::uint64_t feature_seed = derive_seed(settings.seed, kFeatureSalt);

    RrmTrace trace;
    Dataset prev_data = data0;
    KernelModel theta_prev;
    Eigen::VectorXd prev_alpha;
    double C = settings.C_init;
    std::vector<double> eps_values;
    double eps_bar = 0.0;

    for (int t = 1; t <= settings.T_max; ++t) {
        if (t >= 2 && eps_bar > 0.0) C = settings.alpha / eps_bar;

        SolveSettings ss = solver;
        ss.C = C;
        const Eigen::VectorXd* warm =
            (prev_alpha.size() == prev_data.n()) ? &prev_alpha : nullptr;
        const SolveReport rep =
            solve(prev_data, spec, ss, derive_seed(settings.seed, kSolverSalt, t), warm);
        const KernelModel& theta_cur = rep.model;

        const Dataset cur_data =
            apply_map(data0, make_kernel_scorer(theta_cur, data0.tau), map,
                      feature_seed, derive_seed(settings.seed, kLabelSalt, t));

        const double cur_norm = model_norm(theta_cur);
        const double prev_norm = model_norm(theta_prev);
        double consistency = 0.0;
        double gap_t;
        if (t == 1) {
            gap_t = cur_norm;
        } else {
            gap_t = model_diff_norm(theta_prev, theta_cur);
            if (prev_norm > 0.0 && cur_norm > 0.0)
                consistency = model_cosine(theta_prev, theta_cur);
        }

        double eps_t = 0.0;
        double sigma_t = 0.0;
        const bool at_fixed_point = t >= 2 && gap_t <= gap_threshold(prev_norm);
        try {
            if (t == 1) {
                eps_t = estimate_epsilon_initial(data0, cur_data, theta_cur);
            } else if (!at_fixed_point) {
                const EpsilonStepStats stats = estimate_epsilon_step_stats(
                    prev_data, cur_data, theta_prev, theta_cur,
                    settings.violator_filter);
                eps_t = stats.epsilon;
                sigma_t = stats.sigma;
            }
        } catch (const EstimationError& e) {
            trace.aborted = true;
            trace.abort_reason = e.what();
            trace.final_model = theta_cur;
            return trace;
        }

        eps_values.push_back(eps_t);
        double sum = 0.0;
        for (double v : eps_values) sum += v;
        eps_bar = sum / static_cast<double>(eps_values.size());

        RrmRecord row;
        row.t = t;
        row.epsilon = eps_t;
        row.epsilon_bar = eps_bar;
        row.C = C;
        row.accuracy = accuracy(theta_cur, cur_data);
        row.consistency = consistency;
        row.model_gap = gap_t;
        row.dual_gap = rep.gap;
        row.n = cur_data.n();
        row.theta_norm = cur_norm;
        row.sigma = sigma_t;
        row.solver_converged = rep.gap <= 1e3 * ss.tol;
        trace.rows.push_back(row);

        trace.final_model = theta_cur;
        if (t >= 2 && consistency >= settings.convergence_consistency &&
            gap_t <= gap_threshold(prev_norm)) {
            break;
        }

        prev_data = cur_data;
        theta_prev = theta_cur;
        prev_alpha = rep.alpha;
    }
    return trace;
}

ContractionAudit contraction_audit(const RrmTrace& trace, int burn_in) {
    if (trace.rows.size() < 3)
        throw ArgumentError("contraction audit needs at least 3 iterations");

    ContractionAudit audit;
    audit.satisfied = true;
    bool any_ratio = false;
    for (std::size_t i = 0; i + 1 < trace.rows.size(); ++i) {
        const RrmRecord& a = trace.rows[i];
        const RrmRecord& b = trace.rows[i + 1];
        if (a.model_gap <= gap_threshold(a.theta_norm)) continue;
        const double ratio = b.model_gap / a.model_gap;
        if (!any_ratio || ratio > audit.max_ratio) audit.max_ratio = ratio;
        any_ratio = true;
        if (b.t > burn_in && ratio > 1.0) audit.satisfied = false;
    }
    return audit;
}

}  // namespace perfpred
