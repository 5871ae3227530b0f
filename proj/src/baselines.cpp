#include "perfpred/baselines.hpp"

#include <cmath>

#include "perfpred/errors.hpp"
#include "perfpred/metrics.hpp"
#include "perfpred/rng.hpp"

namespace perfpred {

Eigen::VectorXd LinearModel::stacked() const {
    Eigen::VectorXd v(weights.size() + 1);
    v.head(weights.size()) = weights;
    v[weights.size()] = bias;
    return v;
}

namespace {

// log(1 + exp(m)) without overflow.
double log1p_exp(double m) {
    if (m > 0.0) return m + std::log1p(std::exp(-m));
    return std::log1p(std::exp(m));
}

// 1 / (1 + exp(m)) without overflow.
double inv_logistic(double m) {
    if (m > 0.0) {
        const double e = std::exp(-m);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(m));
}

}  // namespace

double lr_loss(const LinearModel& model, const Dataset& data, double l2) {
    const Eigen::VectorXd z =
        (data.features * model.weights).array() + model.bias;
    double sum = 0.0;
    for (int i = 0; i < data.n(); ++i) sum += log1p_exp(-data.labels[i] * z[i]);
    return sum / data.n() + 0.5 * l2 * model.weights.squaredNorm();
}

Eigen::VectorXd lr_gradient(const LinearModel& model, const Dataset& data, double l2) {
    const int n = data.n();
    const Eigen::VectorXd z =
        (data.features * model.weights).array() + model.bias;
    Eigen::VectorXd grad_w = Eigen::VectorXd::Zero(model.weights.size());
    double grad_b = 0.0;
    for (int i = 0; i < n; ++i) {
        // d/dz log(1+exp(-y z)) = -y * sigma(y z)^c = -y / (1 + exp(y z))
        const double coeff = -data.labels[i] * inv_logistic(data.labels[i] * z[i]);
        grad_w.noalias() += coeff * data.features.row(i).transpose();
        grad_b += coeff;
    }
    grad_w /= n;
    grad_b /= n;
    grad_w.noalias() += l2 * model.weights;

    Eigen::VectorXd stacked(grad_w.size() + 1);
    stacked.head(grad_w.size()) = grad_w;
    stacked[grad_w.size()] = grad_b;
    return stacked;
}

LinearModel lr_gradient_step(const LinearModel& model, const Dataset& data,
                             double l2, double lr) {
    const Eigen::VectorXd g = lr_gradient(model, data, l2);
    LinearModel out = model;
    out.weights.noalias() -= lr * g.head(g.size() - 1);
    out.bias -= lr * g[g.size() - 1];
    return out;
}

LinearModel lr_fit(const Dataset& data, double l2, double lr, int max_iters,
                   double tol) {
    validate(data);
    const bool has_pos = (data.labels.array() > 0).any();
    const bool has_neg = (data.labels.array() < 0).any();
    if (!has_pos || !has_neg)
        throw FitError("logistic fit requires both classes present");

    LinearModel model;
    model.weights = Eigen::VectorXd::Zero(data.dim());
    model.bias = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const Eigen::VectorXd g = lr_gradient(model, data, l2);
        if (g.norm() <= tol) break;
        model.weights.noalias() -= lr * g.head(g.size() - 1);
        model.bias -= lr * g[g.size() - 1];
    }
    return model;
}

RawScorer make_linear_scorer(const LinearModel& model) {
    RawScorer scorer;
    scorer.score = [model](const Eigen::MatrixXd& raw) {
        return Eigen::VectorXd((raw * model.weights).array() + model.bias);
    };
    scorer.raw_weights = model.weights;
    return scorer;
}

namespace {

constexpr std::uint64_t kFeatureSalt = 0xFEA7;
constexpr std::uint64_t kLabelSalt = 0x1AB5;

// Encodes (w, b) as a single-support Linear-kernel model so baseline traces
// share the KernelModel slot: theta = (w, b/tau) applied to (x, tau).
KernelModel as_kernel_model(const LinearModel& model, double tau) {
    KernelModel km;
    km.spec.kind = KernelKind::Linear;
    km.support.resize(1, model.weights.size() + 1);
    km.support.row(0).head(model.weights.size()) = model.weights.transpose();
    km.support(0, model.weights.size()) = model.bias / tau;
    km.coeffs = Eigen::VectorXd::Ones(1);
    return km;
}

RrmTrace run_lr_loop(const Dataset& data0, const MapSpec& map,
                     const RrmSettings& settings, const LrSettings& lr_settings,
                     bool full_refit) {
    validate(data0);
    if (settings.T_max < 1) throw ArgumentError("T_max must be >= 1");
    if (map.kind == MapKind::Bankruptcy && !map.mask.has_value())
        throw ArgumentError("bankruptcy map requires a performative mask");

    const std::uint64_t feature_seed = derive_seed(settings.seed, kFeatureSalt);

    RrmTrace trace;
    Dataset prev_data = data0;
    LinearModel model;
    model.weights = Eigen::VectorXd::Zero(data0.dim());
    Eigen::VectorXd prev_stacked;

    for (int t = 1; t <= settings.T_max; ++t) {
        if (full_refit) {
            model = lr_fit(prev_data, lr_settings.l2, lr_settings.lr,
                           lr_settings.max_iters, lr_settings.tol);
        } else {
            model = lr_gradient_step(model, prev_data, lr_settings.l2,
                                     lr_settings.lr);
        }
        const double grad_norm = lr_gradient(model, prev_data, lr_settings.l2).norm();

        const Dataset cur_data =
            apply_map(data0, make_linear_scorer(model), map, feature_seed,
                      derive_seed(settings.seed, kLabelSalt, t));

        const Eigen::VectorXd stacked = model.stacked();
        const double cur_norm = stacked.norm();
        double consistency = 0.0;
        double gap_t;
        if (t == 1) {
            gap_t = cur_norm;
        } else {
            gap_t = (stacked - prev_stacked).norm();
            if (cur_norm > 0.0 && prev_stacked.norm() > 0.0)
                consistency = consistency_linear(prev_stacked, stacked);
        }

        RrmRecord row;
        row.t = t;
        row.C = 0.0;
        row.accuracy = accuracy_of_scores(
            Eigen::VectorXd((cur_data.features * model.weights).array() + model.bias),
            cur_data.labels);
        row.consistency = consistency;
        row.model_gap = gap_t;
        row.dual_gap = grad_norm;
        row.n = cur_data.n();
        row.theta_norm = cur_norm;
        row.solver_converged = !full_refit || grad_norm <= 1e3 * lr_settings.tol;
        trace.rows.push_back(row);

        trace.final_model = as_kernel_model(model, data0.tau);
        const double prev_norm = t == 1 ? 0.0 : prev_stacked.norm();
        if (t >= 2 && consistency >= settings.convergence_consistency &&
            gap_t <= gap_threshold(prev_norm)) {
            break;
        }
        prev_data = cur_data;
        prev_stacked = stacked;
    }
    return trace;
}

}  // namespace

RrmTrace run_rrm_lr(const Dataset& data0, const MapSpec& map,
                    const RrmSettings& settings, const LrSettings& lr_settings) {
    return run_lr_loop(data0, map, settings, lr_settings, true);
}

RrmTrace run_rgd_lr(const Dataset& data0, const MapSpec& map,
                    const RrmSettings& settings, const LrSettings& lr_settings) {
    return run_lr_loop(data0, map, settings, lr_settings, false);
}

}  // namespace perfpred
