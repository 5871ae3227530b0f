#include "perfpred/shift.hpp"

#include <cmath>
#include <random>

#include "perfpred/errors.hpp"
#include "perfpred/rng.hpp"

namespace perfpred {

RawScorer make_kernel_scorer(const KernelModel& model, double tau) {
    RawScorer scorer;
    scorer.score = [model, tau](const Eigen::MatrixXd& raw) {
        return predict(model, augment_rows(raw, tau));
    };
    if (model.spec.kind == KernelKind::Linear && !model.empty()) {
        const Eigen::VectorXd w = explicit_weights(model);
        scorer.raw_weights = w.head(w.size() - 1);  // bias coordinate excluded
    }
    return scorer;
}

Dataset apply_feature_linear(const Dataset& base, const Eigen::VectorXd& raw_weights,
                             double d) {
    validate(base);
    if (raw_weights.size() != base.dim())
        throw ArgumentError("shift weight width does not match raw feature width");
    Dataset out = base;
    out.features.rowwise() -= (d * raw_weights).transpose();
    return out;
}

namespace {

// One point drawn uniformly from the closed L2 ball of radius d in dimension
// p: uniform direction times d * u^(1/p). The rescale loop pins the norm at
// or below d against rounding.
Eigen::VectorXd sample_in_ball(std::mt19937_64& engine, int p, double d) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd dir(p);
    double norm = 0.0;
    do {
        for (int j = 0; j < p; ++j) dir[j] = gauss(engine);
        norm = dir.norm();
    } while (norm == 0.0);
    const double r = d * std::pow(unif(engine), 1.0 / p);
    Eigen::VectorXd offset = dir * (r / norm);
    while (offset.norm() > d) offset *= (1.0 - 1e-15);
    return offset;
}

std::vector<int> mask_indices(const std::optional<PerformativeMask>& mask, int dim) {
    std::vector<int> idx;
    if (!mask.has_value()) {
        idx.resize(dim);
        for (int j = 0; j < dim; ++j) idx[j] = j;
        return idx;
    }
    if (static_cast<int>(mask->performative.size()) != dim)
        throw ArgumentError("performative mask width does not match raw feature width");
    for (int j = 0; j < dim; ++j)
        if (mask->performative[j]) idx.push_back(j);
    if (idx.empty()) throw ArgumentError("performative mask selects no columns");
    return idx;
}

}  // namespace

Dataset apply_feature_simulated(const Dataset& base, const RawScorer& scorer,
                                double d, int n_candidates, std::uint64_t seed,
                                const std::optional<PerformativeMask>& mask) {
    validate(base);
    if (d < 0.0) throw ArgumentError("d must be >= 0");
    if (n_candidates < 1) throw ArgumentError("n_candidates must be >= 1");

    Dataset out = base;
    if (d == 0.0) return out;

    const int n = base.n();
    const int p = base.dim();
    const std::vector<int> idx = mask_indices(mask, p);
    const int pb = static_cast<int>(idx.size());
    const int block = n_candidates + 1;

    // Candidate block per row: the original point first, then the draws.
    Eigen::MatrixXd candidates(n * block, p);
    for (int i = 0; i < n; ++i) {
        candidates.row(i * block) = base.features.row(i);
        auto engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
        for (int c = 1; c < block; ++c) {
            Eigen::VectorXd offset = sample_in_ball(engine, pb, d);
            candidates.row(i * block + c) = base.features.row(i);
            for (int j = 0; j < pb; ++j) candidates(i * block + c, idx[j]) += offset[j];
        }
    }

    const Eigen::VectorXd scores = scorer.score(candidates);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_score = scores[i * block];
        for (int c = 1; c < block; ++c) {
            const double s = scores[i * block + c];
            if (s < best_score) {
                best_score = s;
                best = c;
            }
        }
        if (best != 0) out.features.row(i) = candidates.row(i * block + best);
    }
    return out;
}

Dataset apply_feature_simulated(const Dataset& base, const KernelModel& model,
                                double d, int n_candidates, std::uint64_t seed) {
    return apply_feature_simulated(base, make_kernel_scorer(model, base.tau), d,
                                   n_candidates, seed, std::nullopt);
}

namespace {

double flip_probability(double d, double pstar, bool positive_exponent) {
    const double e = positive_exponent ? -d * pstar : d * pstar;
    // 1 / (1 + exp(e)); exp overflow saturates to 0 or 1 as intended.
    return 1.0 / (1.0 + std::exp(e));
}

}  // namespace

Dataset apply_label_flip(const Dataset& base, const RawScorer& scorer, double d,
                         std::uint64_t seed, bool positive_exponent) {
    validate(base);
    if (d < 0.0) throw ArgumentError("d must be >= 0");

    const Eigen::VectorXd f = scorer.score(base.features);
    const double maxf = f.maxCoeff();
    const double minf = f.minCoeff();

    Dataset out = base;
    for (int i = 0; i < base.n(); ++i) {
        const double y = base.labels[i];
        const bool correct = (y > 0.0) == (f[i] >= 0.0);
        if (!correct) continue;
        double pstar;
        if (y > 0.0) {
            if (maxf <= 1e-12)
                throw MapError("label flip: degenerate normalizer max(f) <= 0");
            pstar = f[i] / maxf;
        } else {
            if (minf >= -1e-12)
                throw MapError("label flip: degenerate normalizer min(f) >= 0");
            pstar = f[i] / minf;
        }
        const double q = flip_probability(d, pstar, positive_exponent);
        auto engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        if (unif(engine) < q) out.labels[i] = -y;
    }
    return out;
}

Dataset apply_label_flip(const Dataset& base, const KernelModel& model, double d,
                         std::uint64_t seed, bool positive_exponent) {
    return apply_label_flip(base, make_kernel_scorer(model, base.tau), d, seed,
                            positive_exponent);
}

Dataset apply_bankruptcy(const Dataset& base, const RawScorer& scorer, double d,
                         double b, const PerformativeMask& mask,
                         std::uint64_t feature_seed, std::uint64_t label_seed,
                         int n_candidates, bool positive_exponent) {
    validate(base);
    if (!std::isfinite(d) || !std::isfinite(b))
        throw ArgumentError("d and b must be finite");
    const std::vector<int> idx = mask_indices(mask, base.dim());

    // Labels react to the prediction issued on the pre-shift data.
    const Eigen::VectorXd f = scorer.score(base.features);

    Dataset out;
    if (scorer.raw_weights.has_value()) {
        if (scorer.raw_weights->size() != base.dim())
            throw ArgumentError("scorer weight width does not match raw feature width");
        out = base;
        for (int j : idx)
            out.features.col(j).array() -= d * (*scorer.raw_weights)[j];
    } else {
        out = apply_feature_simulated(base, scorer, d, n_candidates, feature_seed,
                                      mask);
    }

    bool has_positive = false;
    for (int i = 0; i < base.n(); ++i)
        if (base.labels[i] > 0.0) has_positive = true;
    if (has_positive) {
        const double maxf = f.maxCoeff();
        if (maxf <= 1e-12)
            throw MapError("bankruptcy map: degenerate normalizer max(f) <= 0");
        for (int i = 0; i < base.n(); ++i) {
            if (base.labels[i] <= 0.0) continue;
            const double pstar = f[i] / maxf;
            const double q = flip_probability(b, pstar, positive_exponent);
            auto engine =
                make_engine(derive_seed(label_seed, static_cast<std::uint64_t>(i)));
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            if (unif(engine) < q) out.labels[i] = -1.0;
        }
    }
    return out;
}

Dataset apply_map(const Dataset& base, const RawScorer& scorer, const MapSpec& spec,
                  std::uint64_t feature_seed, std::uint64_t label_seed) {
    switch (spec.kind) {
        case MapKind::FeatureLinear:
            if (scorer.raw_weights.has_value())
                return apply_feature_linear(base, *scorer.raw_weights, spec.d);
            return apply_feature_simulated(base, scorer, spec.d, spec.n_candidates,
                                           feature_seed, std::nullopt);
        case MapKind::FeatureSimulated:
            return apply_feature_simulated(base, scorer, spec.d, spec.n_candidates,
                                           feature_seed, std::nullopt);
        case MapKind::LabelFlip:
            return apply_label_flip(base, scorer, spec.d, label_seed,
                                    spec.positive_flip_exponent);
        case MapKind::Bankruptcy:
            if (!spec.mask.has_value())
                throw ArgumentError("bankruptcy map requires a performative mask");
            return apply_bankruptcy(base, scorer, spec.d, spec.b, *spec.mask,
                                    feature_seed, label_seed, spec.n_candidates,
                                    spec.positive_flip_exponent);
    }
    throw ArgumentError("unknown map kind");
}

}  // namespace perfpred
