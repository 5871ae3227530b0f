#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "perfpred/dataset.hpp"
#include "perfpred/errors.hpp"
#include "perfpred/solver.hpp"
#include "support/oracles.hpp"

using namespace perfpred;

namespace {

Dataset random_dataset(std::mt19937_64& rng, int n, int p) {
    Dataset d;
    d.features = oracles::random_matrix(rng, n, p);
    d.labels = oracles::random_labels(rng, n);
    if ((d.labels.array() > 0).count() == 0) d.labels[0] = 1.0;
    if ((d.labels.array() < 0).count() == 0) d.labels[0] = -1.0;
    return d;
}

Dataset two_point_case() {
    Dataset d;
    d.features.resize(2, 1);
    d.features << 1, -1;
    d.labels.resize(2);
    d.labels << 1, -1;
    d.tau = 1.0;
    return d;
}

const KernelSpec kLinear{KernelKind::Linear, 1.0, false};

}  // namespace

TEST_CASE("vanishing C drives the model to zero") {
    std::mt19937_64 rng(2);
    const Dataset d = random_dataset(rng, 10, 3);
    SolveSettings s;
    s.C = 1e-9;
    s.tol = 1e-12;
    const SolveReport rep = solve(d, kLinear, s, 1);
    CHECK(std::sqrt(model_dot(rep.model, rep.model)) <= 1e-6);
    CHECK(std::abs(rep.primal - s.C) <= 1e-12);
}

TEST_CASE("two-point analytic case") {
    // Symmetric 2-variable QP: optimum alpha = (1/2, 1/2), theta = (1, 0),
    // objective 1/2, both margins exactly 1.
    const Dataset d = two_point_case();
    SolveSettings s;
    s.C = 4.0;
    s.tol = 1e-10;
    const SolveReport rep = solve(d, kLinear, s, 5);

    CHECK(rep.alpha[0] == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rep.alpha[1] == doctest::Approx(0.5).epsilon(1e-8));

    const Eigen::VectorXd w = explicit_weights(rep.model);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(w[1]) <= 1e-8);

    CHECK(rep.primal == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rep.dual == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(rep.gap <= 1e-9);

    const Eigen::VectorXd f = predict(rep.model, augment(d));
    CHECK(d.labels[0] * f[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(d.labels[1] * f[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("dual objective matches the projected-gradient oracle") {
    std::mt19937_64 rng(13);
    for (int rep_i = 0; rep_i < 6; ++rep_i) {
        const Dataset d = random_dataset(rng, 20, 4);
        const KernelSpec spec = rep_i % 2 == 0
                                    ? kLinear
                                    : KernelSpec{KernelKind::Rbf, 0.7, false};
        SolveSettings s;
        s.C = 2.5;
        s.tol = 1e-8;
        const SolveReport rep = solve(d, spec, s, 100 + rep_i);

        const Eigen::MatrixXd K = gram(spec, augment(d), augment(d));
        const auto oracle =
            oracles::qp_projected_gradient(K, d.labels, s.C / d.n(), 1e-10);
        CHECK(std::abs(rep.dual - oracle.dual) <= 1e-6);
        CHECK(rep.gap <= 1e-6);
        CHECK(rep.gap >= -1e-9);
    }
}

TEST_CASE("weak duality holds at every pass") {
    std::mt19937_64 rng(23);
    const Dataset d = random_dataset(rng, 30, 3);
    SolveSettings s;
    s.C = 5.0;
    s.record_history = true;
    const SolveReport rep = solve(d, kLinear, s, 3);
    REQUIRE(!rep.history.empty());
    for (const PassStats& ps : rep.history)
        CHECK(ps.primal >= ps.dual - 1e-9 * std::max(1.0, std::abs(ps.primal)));
}

TEST_CASE("dual variables stay inside the box") {
    std::mt19937_64 rng(31);
    const Dataset d = random_dataset(rng, 25, 3);
    SolveSettings s;
    s.C = 3.0;
    const SolveReport rep = solve(d, kLinear, s, 9);
    const double U = s.C / d.n();
    for (int i = 0; i < d.n(); ++i) {
        CHECK(rep.alpha[i] >= 0.0);
        CHECK(rep.alpha[i] <= U);
    }
}

TEST_CASE("returned model satisfies the strong-convexity lower bound") {
    std::mt19937_64 rng(37);
    const Dataset d = random_dataset(rng, 20, 3);
    SolveSettings s;
    s.C = 2.0;
    s.tol = 1e-10;
    const SolveReport rep = solve(d, kLinear, s, 4);
    const double base = primal_objective(d, rep.model, s.C);

    std::normal_distribution<double> gauss(0.0, 0.3);
    for (int trial = 0; trial < 20; ++trial) {
        KernelModel perturbed = rep.model;
        for (int i = 0; i < perturbed.coeffs.size(); ++i)
            perturbed.coeffs[i] += gauss(rng);
        const double dist = model_diff_norm(perturbed, rep.model);
        const double obj = primal_objective(d, perturbed, s.C);
        CHECK(obj >= base + 0.5 * dist * dist - 1e-6);
    }
}

TEST_CASE("solve is deterministic and warm starts agree") {
    std::mt19937_64 rng(41);
    const Dataset d = random_dataset(rng, 30, 4);
    SolveSettings s;
    s.C = 1.5;
    const SolveReport a = solve(d, kLinear, s, 77);
    const SolveReport b = solve(d, kLinear, s, 77);
    CHECK(a.alpha == b.alpha);
    CHECK(a.primal == b.primal);
    CHECK(a.passes == b.passes);

    const SolveReport warm = solve(d, kLinear, s, 78, &a.alpha);
    CHECK(std::abs(warm.dual - a.dual) <= 1e-6);
    CHECK(warm.passes <= a.passes);
}

TEST_CASE("shrinking returns the same optimum") {
    std::mt19937_64 rng(43);
    const Dataset d = random_dataset(rng, 40, 3);
    SolveSettings plain;
    plain.C = 4.0;
    plain.tol = 1e-9;
    SolveSettings shrunk = plain;
    shrunk.shrink = true;
    const SolveReport a = solve(d, kLinear, plain, 5);
    const SolveReport b = solve(d, kLinear, shrunk, 5);
    CHECK(std::abs(a.dual - b.dual) <= 1e-8);
    CHECK(std::abs(a.primal - b.primal) <= 1e-8);
}

TEST_CASE("primal objective of the zero model is C") {
    std::mt19937_64 rng(47);
    const Dataset d = random_dataset(rng, 12, 3);
    KernelModel zero;
    zero.spec = kLinear;
    CHECK(primal_objective(d, zero, 3.25) == doctest::Approx(3.25).epsilon(1e-14));

    SolveSettings s;
    s.C = 3.25;
    const SolveReport rep = solve(d, kLinear, s, 2);
    CHECK(primal_objective(d, rep.model, s.C) <= 3.25 + 1e-12);
}

TEST_CASE("subgradient of the zero model on one violated point") {
    Dataset d;
    d.features.resize(1, 2);
    d.features << 3, 4;
    d.labels = Eigen::VectorXd::Ones(1);
    d.tau = 1.0;
    KernelModel zero;
    zero.spec = kLinear;
    // ||(C/1) y phi(x)|| = C sqrt(9 + 16 + 1)
    CHECK(subgradient_norm(d, zero, 2.0) ==
          doctest::Approx(2.0 * std::sqrt(26.0)).epsilon(1e-12));

    KernelModel zr;
    zr.spec = KernelSpec{KernelKind::Rbf, 0.5, false};
    CHECK(subgradient_norm(d, zr, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("subgradient vanishes at an all-bound optimum") {
    // With a small C every margin stays violated, no point sits exactly on
    // the margin, and the strict violator sum reproduces theta.
    std::mt19937_64 rng(53);
    const Dataset d = random_dataset(rng, 25, 3);
    SolveSettings s;
    s.C = 0.1;
    s.tol = 1e-12;
    s.max_passes = 20000;
    const SolveReport rep = solve(d, kLinear, s, 8);
    const Eigen::VectorXd f = predict(rep.model, augment(d));
    for (int i = 0; i < d.n(); ++i) CHECK(d.labels[i] * f[i] < 1.0);
    CHECK(subgradient_norm(d, rep.model, s.C) <= 1e-6);
}

TEST_CASE("subgradient theta-term scales linearly on a fixed violator set") {
    // All margins kept strongly violated so doubling theta keeps the set.
    Dataset d;
    d.features.resize(2, 1);
    d.features << 0.1, -0.05;
    d.labels.resize(2);
    d.labels << 1, -1;
    d.tau = 1.0;

    KernelModel theta;
    theta.spec = kLinear;
    theta.support.resize(1, 2);
    theta.support << 1.0, 0.0;
    theta.coeffs = Eigen::VectorXd::Ones(1);

    const double C = 1.0;
    // Explicit computation: g(theta) = theta - (C/n) sum y_i x_i.
    Eigen::VectorXd sum(2);
    sum << (0.1 - (-0.05)), (1.0 - 1.0);
    const Eigen::VectorXd w1 = Eigen::Vector2d(1.0, 0.0) - (C / 2.0) * sum;
    const Eigen::VectorXd w2 = Eigen::Vector2d(2.0, 0.0) - (C / 2.0) * sum;
    CHECK(subgradient_norm(d, theta, C) == doctest::Approx(w1.norm()).epsilon(1e-12));
    KernelModel doubled = theta;
    doubled.coeffs *= 2.0;
    CHECK(subgradient_norm(d, doubled, C) ==
          doctest::Approx(w2.norm()).epsilon(1e-12));
}

TEST_CASE("solver rejects invalid settings") {
    std::mt19937_64 rng(59);
    const Dataset d = random_dataset(rng, 5, 2);
    SolveSettings s;
    s.C = 0.0;
    CHECK_THROWS_AS(solve(d, kLinear, s, 1), ArgumentError);
    s.C = 1.0;
    s.max_passes = 0;
    CHECK_THROWS_AS(solve(d, kLinear, s, 1), ArgumentError);
}

TEST_CASE("single-class input is allowed") {
    Dataset d;
    d.features = Eigen::MatrixXd::Random(6, 2);
    d.labels = Eigen::VectorXd::Ones(6);
    SolveSettings s;
    s.C = 1.0;
    s.tol = 1e-8;
    const SolveReport rep = solve(d, kLinear, s, 1);
    CHECK(rep.gap <= 1e-6);
}
