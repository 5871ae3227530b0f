#include "perfpred/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "perfpred/errors.hpp"

namespace perfpred {

bool operator==(const KernelSpec& a, const KernelSpec& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == KernelKind::Linear) return true;
    return a.sigma == b.sigma && a.squared_exponent == b.squared_exponent;
}

namespace {

void check_widths(Eigen::Index a, Eigen::Index b) {
    if (a != b)
        throw ArgumentError("point width mismatch: " + std::to_string(a) + " vs " +
                            std::to_string(b));
}

void check_sigma(const KernelSpec& spec) {
    if (spec.kind == KernelKind::Rbf && !(spec.sigma > 0.0))
        throw ArgumentError("Rbf kernel requires sigma > 0");
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y) {
    check_widths(x.size(), y.size());
    check_sigma(spec);
    if (spec.kind == KernelKind::Linear) return x.dot(y);
    const double d2 = (x - y).squaredNorm();
    const double dist = spec.squared_exponent ? d2 : std::sqrt(d2);
    return std::exp(-dist / (2.0 * spec.sigma * spec.sigma));
}

Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B) {
    check_widths(A.cols(), B.cols());
    check_sigma(spec);
    if (spec.kind == KernelKind::Linear) return A * B.transpose();

    Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * A * B.transpose());
    d2.colwise() += a2;
    d2.rowwise() += b2.transpose();
    d2 = d2.cwiseMax(0.0);
    const double scale = -1.0 / (2.0 * spec.sigma * spec.sigma);
    if (spec.squared_exponent) return (d2.array() * scale).exp();
    return (d2.array().sqrt() * scale).exp();
}

Eigen::VectorXd predict(const KernelModel& model, const Eigen::MatrixXd& X) {
    if (model.empty()) return Eigen::VectorXd::Zero(X.rows());
    check_widths(model.support.cols(), X.cols());
    return gram(model.spec, X, model.support) * model.coeffs;
}

double model_dot(const KernelModel& m1, const KernelModel& m2) {
    if (m1.empty() || m2.empty()) return 0.0;
    if (m1.spec != m2.spec) throw ArgumentError("kernel spec mismatch in model_dot");
    check_widths(m1.support.cols(), m2.support.cols());
    return m1.coeffs.dot(gram(m1.spec, m1.support, m2.support) * m2.coeffs);
}

double model_norm(const KernelModel& m) {
    return std::sqrt(std::max(0.0, model_dot(m, m)));
}

double model_diff_norm(const KernelModel& m1, const KernelModel& m2) {
    const double d2 =
        model_dot(m1, m1) + model_dot(m2, m2) - 2.0 * model_dot(m1, m2);
    return std::sqrt(std::max(0.0, d2));
}

double model_cosine(const KernelModel& m1, const KernelModel& m2) {
    const double n1 = model_norm(m1);
    const double n2 = model_norm(m2);
    if (n1 <= 0.0 || n2 <= 0.0)
        throw ArgumentError("model_cosine undefined for a zero-norm model");
    const double c = model_dot(m1, m2) / (n1 * n2);
    return std::clamp(c, -1.0, 1.0);
}

Eigen::VectorXd explicit_weights(const KernelModel& model) {
    if (model.spec.kind != KernelKind::Linear)
        throw ArgumentError("explicit weights exist only for Linear kernels");
    if (model.empty()) throw ArgumentError("explicit weights of an empty model");
    return model.support.transpose() * model.coeffs;
}

}  // namespace perfpred
