#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace perfpred {

// A labeled sample set. `features` holds the raw (un-augmented) points, one
// row per sample; `labels` is in {-1, +1}; `tau` is the constant appended by
// augment() so the bias term lives inside the model vector.
struct Dataset {
    Eigen::MatrixXd features;  // n x p
    Eigen::VectorXd labels;    // n, entries exactly -1 or +1
    double tau = 1.0;
    std::string meta;

    int n() const { return static_cast<int>(features.rows()); }
    int dim() const { return static_cast<int>(features.cols()); }
};

// Marks which raw feature columns a strategic agent may modify.
struct PerformativeMask {
    std::vector<bool> performative;  // length p

    int count() const {
        int c = 0;
        for (bool b : performative) c += b ? 1 : 0;
        return c;
    }
};

// Throws ArgumentError if the dataset violates its invariants
// (labels in {-1,+1}, n >= 1, finite features, tau > 0).
void validate(const Dataset& data);

// Appends the constant tau column: row i becomes (x_i, tau).
Eigen::MatrixXd augment(const Dataset& data);

// Augments an arbitrary raw-point matrix with the given tau.
Eigen::MatrixXd augment_rows(const Eigen::MatrixXd& raw, double tau);

// Two Gaussian clusters with centers +/- class_sep/sqrt(n_informative) on the
// informative coordinates; the remaining coordinates are standard-normal
// noise. Rows: n_per_class labeled +1 followed by n_per_class labeled -1.
Dataset gen_linear_synthetic(int n_per_class, int dim, int n_informative,
                             double class_sep, std::uint64_t seed);

// Concentric circles: outer radius 1 labeled -1, inner radius 0.5 labeled +1,
// equally spaced angles, i.i.d. Gaussian coordinate noise of std noise_std.
Dataset gen_circles(int n_per_class, double noise_std, std::uint64_t seed);

// Loads a headered CSV. Rows whose label cell equals positive_label map to
// +1, the (single) other value maps to -1. Feature columns default to every
// non-label column. Features are z-score standardized per column
// (population std; constant columns are centered only).
Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label,
                 const std::vector<std::string>& feature_columns = {});

// NearMiss-3 undersampling. Keeps the minority class intact and reduces the
// majority class to the minority cardinality in two stages: candidates are
// the union over minority points of their k nearest majority neighbors;
// retained majority points are those with the largest average distance to
// their k nearest minority neighbors (candidates ranked first, ties broken
// by lowest row index). Output preserves input row order.
Dataset nearmiss3_undersample(const Dataset& data, int minority_label, int k,
                              std::uint64_t seed);

}  // namespace perfpred
