#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perfpred/baselines.hpp"
#include "perfpred/kernel.hpp"
#include "perfpred/rrm.hpp"
#include "perfpred/shift.hpp"
#include "perfpred/solver.hpp"

namespace perfpred {

enum class DatasetKind { LinearSynthetic, Circles, Csv };

struct DatasetConfig {
    DatasetKind kind = DatasetKind::Circles;
    std::string name;  // label used in summary rows; defaults to the kind
    // linear_synthetic
    int n_per_class = 100;
    int dim = 50;
    int n_informative = 40;
    double class_sep = 1.0;
    // circles
    double noise_std = 0.2;
    // csv
    std::string path;
    std::string label_column;
    std::string positive_label;
    std::vector<std::string> feature_columns;
    bool nearmiss = false;
    int nearmiss_k = 3;
    int nearmiss_minority_label = 1;
};

struct MapConfig {
    MapKind kind = MapKind::FeatureSimulated;
    std::vector<double> d_values;          // one experiment cell per value
    std::vector<double> b_values;          // bankruptcy; empty -> -0.01 d + 15
    int n_candidates = 100;
    std::vector<int> performative_columns; // bankruptcy mask
    bool positive_flip_exponent = false;
};

enum class Method { Np2m2, RrmLr, RgdLr };

std::string method_name(Method m);

// Fully-resolved description of one experiment file.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string output_dir;
    double tau = 1.0;
    DatasetConfig dataset;
    KernelSpec kernel;
    MapConfig map;
    std::vector<Method> methods;
    RrmSettings rrm;
    SolveSettings solver;
    LrSettings baseline;
};

// Parses and validates a config file (JSON). Unknown keys anywhere in the
// tree are rejected; messages carry the offending key path or parse
// position. Throws ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// The fully-resolved snapshot written next to the outputs (all defaults
// materialized, plus the artifact version).
std::string config_snapshot_json(const ExperimentConfig& config);
ExperimentConfig parse_snapshot_json(const std::string& text);

}  // namespace perfpred
