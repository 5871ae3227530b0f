#include "perfpred/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "perfpred/csv.hpp"
#include "perfpred/errors.hpp"
#include "perfpred/rng.hpp"

namespace perfpred {

void validate(const Dataset& data) {
    if (data.features.rows() < 1) throw ArgumentError("dataset must have n >= 1 rows");
    if (data.labels.size() != data.features.rows())
        throw ArgumentError("label count does not match row count");
    if (!(data.tau > 0.0)) throw ArgumentError("tau must be positive");
    if (!data.features.allFinite()) throw ArgumentError("non-finite feature entry");
    for (Eigen::Index i = 0; i < data.labels.size(); ++i) {
        double y = data.labels[i];
        if (y != 1.0 && y != -1.0)
            throw ArgumentError("label at row " + std::to_string(i) +
                                " is not in {-1, +1}");
    }
}

Eigen::MatrixXd augment_rows(const Eigen::MatrixXd& raw, double tau) {
    Eigen::MatrixXd out(raw.rows(), raw.cols() + 1);
    out.leftCols(raw.cols()) = raw;
    out.col(raw.cols()).setConstant(tau);
    return out;
}

Eigen::MatrixXd augment(const Dataset& data) {
    return augment_rows(data.features, data.tau);
}

Dataset gen_linear_synthetic(int n_per_class, int dim, int n_informative,
                             double class_sep, std::uint64_t seed) {
    if (n_per_class < 1) throw ArgumentError("n_per_class must be >= 1");
    if (n_informative < 1 || n_informative > dim)
        throw ArgumentError("need 0 < n_informative <= dim");

    const int n = 2 * n_per_class;
    Eigen::MatrixXd X(n, dim);
    Eigen::VectorXd y(n);
    const double offset = class_sep / std::sqrt(static_cast<double>(n_informative));

    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        const double label = i < n_per_class ? 1.0 : -1.0;
        y[i] = label;
        for (int j = 0; j < dim; ++j) {
            double v = gauss(engine);
            if (j < n_informative) v += label * offset;
            X(i, j) = v;
        }
    }

    Dataset data;
    data.features = std::move(X);
    data.labels = std::move(y);
    data.meta = "linear_synthetic";
    return data;
}

Dataset gen_circles(int n_per_class, double noise_std, std::uint64_t seed) {
    if (n_per_class < 1) throw ArgumentError("n_per_class must be >= 1");
    if (noise_std < 0.0) throw ArgumentError("noise_std must be >= 0");

    const int n = 2 * n_per_class;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    const double two_pi = 2.0 * M_PI;

    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Outer circle (radius 1, label -1) then inner (radius 0.5, label +1),
    // equally spaced angles.
    for (int i = 0; i < n_per_class; ++i) {
        const double angle = two_pi * i / n_per_class;
        X(i, 0) = std::cos(angle);
        X(i, 1) = std::sin(angle);
        y[i] = -1.0;
    }
    for (int i = 0; i < n_per_class; ++i) {
        const double angle = two_pi * i / n_per_class;
        X(n_per_class + i, 0) = 0.5 * std::cos(angle);
        X(n_per_class + i, 1) = 0.5 * std::sin(angle);
        y[n_per_class + i] = 1.0;
    }
    if (noise_std > 0.0) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < 2; ++j) X(i, j) += noise_std * gauss(engine);
    }

    Dataset data;
    data.features = std::move(X);
    data.labels = std::move(y);
    data.meta = "circles";
    return data;
}

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label,
                 const std::vector<std::string>& feature_columns) {
    CsvTable table = read_csv_file(path);
    const int label_idx = table.column(label_column);
    if (label_idx < 0)
        throw IngestionError(path + ": missing label column '" + label_column + "'");

    std::vector<int> feat_idx;
    if (feature_columns.empty()) {
        for (std::size_t j = 0; j < table.header.size(); ++j)
            if (static_cast<int>(j) != label_idx) feat_idx.push_back(static_cast<int>(j));
    } else {
        for (const auto& name : feature_columns) {
            int idx = table.column(name);
            if (idx < 0)
                throw IngestionError(path + ": missing feature column '" + name + "'");
            feat_idx.push_back(idx);
        }
    }
    if (table.rows.empty()) throw IngestionError(path + ": no data rows");

    const int n = static_cast<int>(table.rows.size());
    const int p = static_cast<int>(feat_idx.size());
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    std::string negative_label;
    bool have_negative = false;

    for (int i = 0; i < n; ++i) {
        const auto& row = table.rows[i];
        const std::string& label_cell = row[label_idx];
        if (label_cell == positive_label) {
            y[i] = 1.0;
        } else {
            if (!have_negative) {
                negative_label = label_cell;
                have_negative = true;
            } else if (label_cell != negative_label) {
                throw IngestionError(path + ": unknown label value '" + label_cell +
                                     "' at data row " + std::to_string(i + 1) +
                                     " (binary labels expected)");
            }
            y[i] = -1.0;
        }
        for (int j = 0; j < p; ++j) {
            const std::string& cell = row[feat_idx[j]];
            try {
                std::size_t pos = 0;
                double v = std::stod(cell, &pos);
                if (pos != cell.size()) throw std::invalid_argument("trailing chars");
                if (!std::isfinite(v)) throw std::invalid_argument("non-finite");
                X(i, j) = v;
            } catch (const std::exception&) {
                throw IngestionError(path + ": non-numeric cell '" + cell +
                                     "' at data row " + std::to_string(i + 1) +
                                     ", column '" + table.header[feat_idx[j]] + "'");
            }
        }
    }
    if ((y.array() > 0).count() == 0)
        throw IngestionError(path + ": positive label '" + positive_label +
                             "' matched no rows");

    // z-score per column (population std); constant columns are centered only.
    for (int j = 0; j < p; ++j) {
        const double mean = X.col(j).mean();
        X.col(j).array() -= mean;
        const double var = X.col(j).squaredNorm() / n;
        const double sd = std::sqrt(var);
        if (sd > 1e-12) X.col(j) /= sd;
    }

    Dataset data;
    data.features = std::move(X);
    data.labels = std::move(y);
    data.meta = path;
    return data;
}

namespace {

// Pairwise Euclidean distances between row sets.
Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd d2 = (-2.0 * A * B.transpose());
    d2.colwise() += a2;
    d2.rowwise() += b2.transpose();
    return d2.cwiseMax(0.0).cwiseSqrt();
}

// Mean of the k smallest entries of a row.
double mean_of_k_smallest(const Eigen::VectorXd& row, int k) {
    std::vector<double> v(row.data(), row.data() + row.size());
    std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
    double sum = std::accumulate(v.begin(), v.begin() + k, 0.0);
    return sum / k;
}

}  // namespace

Dataset nearmiss3_undersample(const Dataset& data, int minority_label, int k,
                              std::uint64_t seed) {
    (void)seed;  // selection is fully deterministic; ties break by row index
    validate(data);
    if (k < 1) throw ArgumentError("k must be >= 1");
    if (minority_label != 1 && minority_label != -1)
        throw ArgumentError("minority_label must be +1 or -1");

    std::vector<int> minority_rows, majority_rows;
    for (int i = 0; i < data.n(); ++i) {
        if (static_cast<int>(data.labels[i]) == minority_label)
            minority_rows.push_back(i);
        else
            majority_rows.push_back(i);
    }
    if (minority_rows.empty() || majority_rows.empty())
        throw ArgumentError("nearmiss3 requires both classes present");
    if (minority_rows.size() > majority_rows.size())
        throw ArgumentError("minority class is larger than majority class");

    const int n_min = static_cast<int>(minority_rows.size());
    const int n_maj = static_cast<int>(majority_rows.size());
    const int k_stage1 = std::min(k, n_maj);
    const int k_stage2 = std::min(k, n_min);

    Eigen::MatrixXd Xmin(n_min, data.dim()), Xmaj(n_maj, data.dim());
    for (int i = 0; i < n_min; ++i) Xmin.row(i) = data.features.row(minority_rows[i]);
    for (int i = 0; i < n_maj; ++i) Xmaj.row(i) = data.features.row(majority_rows[i]);

    // Stage 1: each minority point nominates its k nearest majority points.
    Eigen::MatrixXd d_min_maj = pairwise_distances(Xmin, Xmaj);
    std::set<int> candidate_set;
    for (int i = 0; i < n_min; ++i) {
        std::vector<int> order(n_maj);
        std::iota(order.begin(), order.end(), 0);
        const Eigen::VectorXd dists = d_min_maj.row(i);
        std::partial_sort(order.begin(), order.begin() + k_stage1, order.end(),
                          [&](int a, int b) {
                              if (dists[a] != dists[b]) return dists[a] < dists[b];
                              return a < b;
                          });
        for (int j = 0; j < k_stage1; ++j) candidate_set.insert(order[j]);
    }

    // Stage 2: rank by average distance to the k nearest minority points,
    // largest first; candidates outrank non-candidates.
    Eigen::MatrixXd d_maj_min = d_min_maj.transpose();
    struct Scored {
        int maj_index;
        bool candidate;
        double score;
    };
    std::vector<Scored> scored(n_maj);
    for (int j = 0; j < n_maj; ++j) {
        scored[j] = {j, candidate_set.count(j) > 0,
                     mean_of_k_smallest(d_maj_min.row(j), k_stage2)};
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.candidate != b.candidate) return a.candidate;
        if (a.score != b.score) return a.score > b.score;
        return a.maj_index < b.maj_index;
    });

    std::vector<bool> keep(data.n(), false);
    for (int r : minority_rows) keep[r] = true;
    for (int j = 0; j < n_min; ++j) keep[majority_rows[scored[j].maj_index]] = true;

    Dataset out;
    out.tau = data.tau;
    out.meta = data.meta;
    const int n_out = 2 * n_min;
    out.features.resize(n_out, data.dim());
    out.labels.resize(n_out);
    int w = 0;
    for (int i = 0; i < data.n(); ++i) {
        if (!keep[i]) continue;
        out.features.row(w) = data.features.row(i);
        out.labels[w] = data.labels[i];
        ++w;
    }
    return out;
}

}  // namespace perfpred
