#pragma once

#include <Eigen/Dense>

namespace perfpred {

enum class KernelKind { Linear, Rbf };

struct KernelSpec {
    KernelKind kind = KernelKind::Linear;
    double sigma = 1.0;  // Rbf bandwidth
    // Rbf exponent form: false -> exp(-||x-x'|| / (2 sigma^2)),
    // true -> exp(-||x-x'||^2 / (2 sigma^2)).
    bool squared_exponent = false;
};

bool operator==(const KernelSpec& a, const KernelSpec& b);
inline bool operator!=(const KernelSpec& a, const KernelSpec& b) { return !(a == b); }

// Implicit model theta = sum_i coeffs[i] * phi(support.row(i)). An empty
// support (m = 0) encodes the zero model. Support rows live in augmented
// coordinates (width p+1).
struct KernelModel {
    Eigen::MatrixXd support;  // m x (p+1)
    Eigen::VectorXd coeffs;   // m
    KernelSpec spec;

    int size() const { return static_cast<int>(coeffs.size()); }
    bool empty() const { return coeffs.size() == 0; }
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& y);

// Entry (i, j) = K(A.row(i), B.row(j)).
Eigen::MatrixXd gram(const KernelSpec& spec, const Eigen::MatrixXd& A,
                     const Eigen::MatrixXd& B);

// f_i = sum_j coeffs[j] K(support_j, X_i); zero vector for the empty model.
Eigen::VectorXd predict(const KernelModel& model, const Eigen::MatrixXd& X);

// <theta1, theta2> through the kernel; requires identical specs.
double model_dot(const KernelModel& m1, const KernelModel& m2);

// ||theta1 - theta2|| with a max(0, .) clamp absorbing round-off.
double model_diff_norm(const KernelModel& m1, const KernelModel& m2);

double model_norm(const KernelModel& m);

// Cosine similarity clamped to [-1, 1]; throws on a zero-norm argument.
double model_cosine(const KernelModel& m1, const KernelModel& m2);

// For Linear kernels only: the explicit augmented weight vector
// w = sum_i coeffs[i] * support_i.
Eigen::VectorXd explicit_weights(const KernelModel& model);

}  // namespace perfpred
