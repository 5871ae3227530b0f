#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "perfpred/dataset.hpp"
#include "perfpred/errors.hpp"
#include "perfpred/shift.hpp"
#include "support/oracles.hpp"

using namespace perfpred;

namespace {

Dataset small_dataset(std::mt19937_64& rng, int n, int p) {
    Dataset d;
    d.features = oracles::random_matrix(rng, n, p);
    d.labels = oracles::random_labels(rng, n);
    if ((d.labels.array() > 0).count() == 0) d.labels[0] = 1.0;
    if ((d.labels.array() < 0).count() == 0) d.labels[0] = -1.0;
    return d;
}

KernelModel linear_model(const Eigen::VectorXd& w_augmented) {
    KernelModel m;
    m.spec.kind = KernelKind::Linear;
    m.support = w_augmented.transpose();
    m.coeffs = Eigen::VectorXd::Ones(1);
    return m;
}

}  // namespace

TEST_CASE("feature_linear shifts every row by d * w") {
    Dataset d;
    d.features.resize(1, 2);
    d.features << 3, 4;
    d.labels = Eigen::VectorXd::Ones(1);

    Eigen::VectorXd w(2);
    w << 1, 0;
    const Dataset shifted = apply_feature_linear(d, w, 1.0);
    CHECK(shifted.features(0, 0) == 2.0);
    CHECK(shifted.features(0, 1) == 4.0);
    CHECK(shifted.labels == d.labels);
    CHECK(d.features(0, 0) == 3.0);  // input untouched

    const Dataset identity = apply_feature_linear(d, w, 0.0);
    CHECK(identity.features == d.features);

    // Additivity: d then d' equals d + d'.
    std::mt19937_64 rng(1);
    const Dataset base = small_dataset(rng, 10, 3);
    Eigen::VectorXd w3(3);
    w3 << 0.4, -1.2, 0.7;
    const Dataset two_steps =
        apply_feature_linear(apply_feature_linear(base, w3, 0.3), w3, 1.1);
    const Dataset one_step = apply_feature_linear(base, w3, 1.4);
    CHECK((two_steps.features - one_step.features).cwiseAbs().maxCoeff() <= 1e-12);

    Eigen::VectorXd bad(2);
    bad << 1, 2;
    CHECK_THROWS_AS(apply_feature_linear(base, bad, 1.0), ArgumentError);
}

TEST_CASE("feature_simulated selects the scored argmin over its candidates") {
    Dataset d;
    d.features.resize(1, 2);
    d.features << 0.5, -0.25;
    d.labels = Eigen::VectorXd::Ones(1);

    // Recording scorer: captures exactly the candidate rows the map scored,
    // so the test can re-run the argmin independently.
    std::vector<Eigen::MatrixXd> seen;
    RawScorer scorer;
    scorer.score = [&seen](const Eigen::MatrixXd& X) {
        seen.push_back(X);
        return Eigen::VectorXd(X.col(0) - 2.0 * X.col(1));
    };

    const Dataset out = apply_feature_simulated(d, scorer, 0.4, 5, 99);
    REQUIRE(seen.size() == 1);
    const Eigen::MatrixXd& cands = seen[0];
    REQUIRE(cands.rows() == 6);

    int best = 0;
    double best_score = cands(0, 0) - 2.0 * cands(0, 1);
    for (int c = 1; c < 6; ++c) {
        const double s = cands(c, 0) - 2.0 * cands(c, 1);
        if (s < best_score) {
            best_score = s;
            best = c;
        }
    }
    CHECK(out.features.row(0) == cands.row(best));
    CHECK(cands.row(0) == d.features.row(0));  // original is candidate 0
}

TEST_CASE("feature_simulated respects the displacement bound exactly") {
    std::mt19937_64 rng(7);
    const Dataset base = small_dataset(rng, 50, 3);
    const KernelModel model =
        linear_model((Eigen::VectorXd(4) << 1.0, -0.5, 0.25, 0.0).finished());

    for (double d : {0.05, 0.3, 2.0}) {
        const Dataset out = apply_feature_simulated(base, model, d, 20, 123);
        for (int i = 0; i < base.n(); ++i) {
            const double moved = (out.features.row(i) - base.features.row(i)).norm();
            CHECK(moved <= d);
        }
        CHECK(out.labels == base.labels);
    }

    const Dataset frozen = apply_feature_simulated(base, model, 0.0, 20, 123);
    CHECK(frozen.features == base.features);
}

TEST_CASE("feature_simulated never increases the mean score") {
    std::mt19937_64 rng(17);
    const Dataset base = small_dataset(rng, 40, 2);
    const KernelModel model =
        linear_model((Eigen::VectorXd(3) << 0.8, -1.1, 0.2).finished());
    const RawScorer scorer = make_kernel_scorer(model, base.tau);

    const Dataset out = apply_feature_simulated(base, scorer, 0.5, 15, 3);
    CHECK(scorer.score(out.features).mean() <= scorer.score(base.features).mean());
}

TEST_CASE("feature_simulated is deterministic per seed") {
    std::mt19937_64 rng(19);
    const Dataset base = small_dataset(rng, 10, 2);
    const KernelModel model =
        linear_model((Eigen::VectorXd(3) << 1.0, 1.0, 0.0).finished());
    const Dataset a = apply_feature_simulated(base, model, 0.3, 10, 5);
    const Dataset b = apply_feature_simulated(base, model, 0.3, 10, 5);
    const Dataset c = apply_feature_simulated(base, model, 0.3, 10, 6);
    CHECK(a.features == b.features);
    CHECK(a.features != c.features);
}

TEST_CASE("masked simulation leaves unmasked columns untouched") {
    std::mt19937_64 rng(23);
    const Dataset base = small_dataset(rng, 20, 4);
    const KernelModel model = linear_model(
        (Eigen::VectorXd(5) << 0.3, -0.6, 1.0, 0.1, 0.0).finished());
    PerformativeMask mask;
    mask.performative = {true, false, true, false};

    const Dataset out = apply_feature_simulated(base, make_kernel_scorer(model, 1.0),
                                                0.4, 10, 7, mask);
    CHECK(out.features.col(1) == base.features.col(1));
    CHECK(out.features.col(3) == base.features.col(3));
    CHECK(out.features.col(0) != base.features.col(0));
}

TEST_CASE("label flip keeps misclassified points and features") {
    Dataset d;
    d.features.resize(3, 1);
    d.features << 1.0, 2.0, -1.0;
    d.labels.resize(3);
    d.labels << -1, 1, 1;  // row 0 and row 2 are misclassified by f(x) = x
    const KernelModel model = linear_model((Eigen::VectorXd(2) << 1.0, 0.0).finished());

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const Dataset out = apply_label_flip(d, model, 4.0, seed);
        CHECK(out.labels[0] == -1.0);
        CHECK(out.labels[2] == 1.0);
        CHECK(out.features == d.features);
    }
}

TEST_CASE("flip frequency tracks the closed form") {
    // Two correctly classified +1 points: the extremal one (p* = 1) and a
    // boundary-ish one. Flip probability is 1/(1 + exp(d p*)).
    Dataset d;
    d.features.resize(2, 1);
    d.features << 2.0, 0.2;
    d.labels.resize(2);
    d.labels << 1, 1;
    const KernelModel model = linear_model((Eigen::VectorXd(2) << 1.0, 0.0).finished());

    const double dpar = 3.0;
    int flips0 = 0, flips1 = 0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        const Dataset out = apply_label_flip(d, model, dpar, 1000 + r);
        if (out.labels[0] < 0) ++flips0;
        if (out.labels[1] < 0) ++flips1;
    }
    const double p0 = 1.0 / (1.0 + std::exp(dpar * 1.0));
    const double p1 = 1.0 / (1.0 + std::exp(dpar * 0.1));
    CHECK(std::abs(static_cast<double>(flips0) / reps - p0) < 0.01);
    CHECK(std::abs(static_cast<double>(flips1) / reps - p1) < 0.01);
}

TEST_CASE("d = 0 flips correctly classified points at one half") {
    Dataset d;
    d.features.resize(1, 1);
    d.features << 1.0;
    d.labels = Eigen::VectorXd::Ones(1);
    const KernelModel model = linear_model((Eigen::VectorXd(2) << 1.0, 0.0).finished());
    int flips = 0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r)
        if (apply_label_flip(d, model, 0.0, 5000 + r).labels[0] < 0) ++flips;
    CHECK(std::abs(static_cast<double>(flips) / reps - 0.5) < 0.02);
}

TEST_CASE("positive exponent variant mirrors the flip probability") {
    // Under the mirrored form the extremal point flips almost surely at
    // d = 10: exp(10)/(1 + exp(10)).
    Dataset d;
    d.features.resize(1, 1);
    d.features << 1.0;
    d.labels = Eigen::VectorXd::Ones(1);
    const KernelModel model = linear_model((Eigen::VectorXd(2) << 1.0, 0.0).finished());

    int flips_default = 0, flips_mirrored = 0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        if (apply_label_flip(d, model, 10.0, r).labels[0] < 0) ++flips_default;
        if (apply_label_flip(d, model, 10.0, r, true).labels[0] < 0)
            ++flips_mirrored;
    }
    CHECK(flips_default <= 2);           // 1/(1+e^10) ~ 4.5e-5
    CHECK(flips_mirrored >= reps - 2);   // e^10/(1+e^10) ~ 0.99995
}

TEST_CASE("label flip raises on a degenerate normalizer") {
    Dataset d;
    d.features.resize(2, 1);
    d.features << 1.0, -1.0;
    d.labels.resize(2);
    d.labels << 1, -1;
    const KernelModel tiny =
        linear_model((Eigen::VectorXd(2) << 5e-13, 0.0).finished());
    CHECK_THROWS_AS(apply_label_flip(d, tiny, 1.0, 0), MapError);
}

TEST_CASE("bankruptcy map honors the mask and the label rule") {
    std::mt19937_64 rng(31);
    Dataset base = small_dataset(rng, 30, 5);
    PerformativeMask mask;
    mask.performative = {true, true, false, true, false};

    Eigen::VectorXd w_aug(6);
    w_aug << 0.5, -0.3, 0.8, 0.1, -0.6, 0.0;
    const KernelModel model = linear_model(w_aug);
    const RawScorer scorer = make_kernel_scorer(model, base.tau);
    REQUIRE(scorer.raw_weights.has_value());

    // Align labels with the scores so every +1 row has p* > 0; only then do
    // the b -> +/- infinity limits pin the flip behavior for all rows.
    {
        const Eigen::VectorXd f = scorer.score(base.features);
        for (int i = 0; i < base.n(); ++i) base.labels[i] = f[i] >= 0 ? 1.0 : -1.0;
        REQUIRE((base.labels.array() > 0).count() >= 1);
    }

    const Dataset out =
        apply_bankruptcy(base, scorer, 2.0, 1e6, mask, 11, 12);
    // Non-performative columns bit-identical.
    CHECK(out.features.col(2) == base.features.col(2));
    CHECK(out.features.col(4) == base.features.col(4));
    // Linear strategy on the masked columns.
    for (int j : {0, 1, 3}) {
        const Eigen::VectorXd expected =
            base.features.col(j).array() - 2.0 * w_aug[j];
        CHECK((out.features.col(j) - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
    // b -> +inf keeps every label.
    CHECK(out.labels == base.labels);

    // b -> -inf flips every +1 label; -1 rows never flip.
    const Dataset flipped =
        apply_bankruptcy(base, scorer, 0.0, -1e6, mask, 11, 12);
    for (int i = 0; i < base.n(); ++i) CHECK(flipped.labels[i] == -1.0);
}

TEST_CASE("bankruptcy uses masked simulation for kernel scorers") {
    std::mt19937_64 rng(37);
    Dataset base = small_dataset(rng, 15, 3);
    PerformativeMask mask;
    mask.performative = {true, false, true};

    KernelModel rbf;
    rbf.spec = KernelSpec{KernelKind::Rbf, 0.9, false};
    rbf.support = oracles::random_matrix(rng, 4, 4);
    rbf.coeffs = oracles::random_matrix(rng, 4, 1).col(0);
    const RawScorer scorer = make_kernel_scorer(rbf, base.tau);
    CHECK(!scorer.raw_weights.has_value());

    const Dataset out = apply_bankruptcy(base, scorer, 0.5, 5.0, mask, 21, 22);
    CHECK(out.features.col(1) == base.features.col(1));
    for (int i = 0; i < base.n(); ++i)
        CHECK((out.features.row(i) - base.features.row(i)).norm() <= 0.5);
}

TEST_CASE("bankruptcy intensity follows the d rule") {
    CHECK(bankruptcy_intensity(100.0) == doctest::Approx(14.0).epsilon(1e-12));
    CHECK(bankruptcy_intensity(1000.0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("apply_map falls back to simulation for implicit models") {
    std::mt19937_64 rng(41);
    const Dataset base = small_dataset(rng, 12, 2);

    KernelModel rbf;
    rbf.spec = KernelSpec{KernelKind::Rbf, 0.5, false};
    rbf.support = oracles::random_matrix(rng, 3, 3);
    rbf.coeffs = oracles::random_matrix(rng, 3, 1).col(0);
    const RawScorer scorer = make_kernel_scorer(rbf, base.tau);

    MapSpec spec;
    spec.kind = MapKind::FeatureLinear;
    spec.d = 0.3;
    spec.n_candidates = 8;
    const Dataset via_map = apply_map(base, scorer, spec, 77, 78);
    const Dataset direct =
        apply_feature_simulated(base, scorer, 0.3, 8, 77, std::nullopt);
    CHECK(via_map.features == direct.features);
}
