#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "perfpred/dataset.hpp"
#include "perfpred/kernel.hpp"

namespace perfpred {

enum class MapKind { FeatureLinear, FeatureSimulated, LabelFlip, Bankruptcy };

// Declarative description of a data-distribution map D(theta).
struct MapSpec {
    MapKind kind = MapKind::FeatureLinear;
    double d = 0.0;        // sensitivity parameter
    double b = 0.0;        // bankruptcy label intensity
    int n_candidates = 100;
    std::optional<PerformativeMask> mask;  // bankruptcy only
    // Label maps flip a correctly classified point with probability
    // 1 / (1 + exp(d * p*)), which decreases as the point moves away from
    // the decision plane and as d grows. Setting positive_flip_exponent
    // selects the mirrored form exp(d p*) / (1 + exp(d p*)) instead.
    bool positive_flip_exponent = false;
};

// Scores raw-space points under some deployed model. raw_weights is present
// only for models with an explicit linear form (weights over raw features;
// the bias is not part of it).
struct RawScorer {
    std::function<Eigen::VectorXd(const Eigen::MatrixXd&)> score;
    std::optional<Eigen::VectorXd> raw_weights;
};

// Scorer for a kernel model trained on tau-augmented points.
RawScorer make_kernel_scorer(const KernelModel& model, double tau);

// X <- X0 - d * raw_weights applied to every row; labels untouched.
Dataset apply_feature_linear(const Dataset& base, const Eigen::VectorXd& raw_weights,
                             double d);

// Every row spawns n_candidates uniform draws from the closed L2 ball of
// radius d around it (the original point participates as candidate 0) and
// moves to the candidate with the lowest score. With a mask, only the masked
// coordinates vary and the ball lives in the masked subspace.
Dataset apply_feature_simulated(const Dataset& base, const RawScorer& scorer,
                                double d, int n_candidates, std::uint64_t seed,
                                const std::optional<PerformativeMask>& mask = {});
Dataset apply_feature_simulated(const Dataset& base, const KernelModel& model,
                                double d, int n_candidates, std::uint64_t seed);

// Misclassified points keep their label; a correctly classified point flips
// with probability 1/(1 + exp(d p*)), p* = f/max(f) on the +1 side and
// f/min(f) on the -1 side (extrema taken over the whole dataset).
Dataset apply_label_flip(const Dataset& base, const RawScorer& scorer, double d,
                         std::uint64_t seed, bool positive_exponent = false);
Dataset apply_label_flip(const Dataset& base, const KernelModel& model, double d,
                         std::uint64_t seed, bool positive_exponent = false);

// Mixed map: masked feature columns shift (linear strategy when the scorer
// carries explicit weights, otherwise the simulated strategy restricted to
// the mask); labels flip only from +1 to -1 with probability
// 1/(1 + exp(b p*)), p* = f/max(f).
Dataset apply_bankruptcy(const Dataset& base, const RawScorer& scorer, double d,
                         double b, const PerformativeMask& mask,
                         std::uint64_t feature_seed, std::uint64_t label_seed,
                         int n_candidates = 100, bool positive_exponent = false);

// Dispatches on spec.kind. FeatureLinear falls back to the simulated
// strategy when the scorer has no explicit weight form. feature_seed drives
// candidate sampling, label_seed drives flip draws.
Dataset apply_map(const Dataset& base, const RawScorer& scorer, const MapSpec& spec,
                  std::uint64_t feature_seed, std::uint64_t label_seed);

// Default bankruptcy label intensity for a feature sensitivity d.
inline double bankruptcy_intensity(double d) { return -0.01 * d + 15.0; }

}  // namespace perfpred
