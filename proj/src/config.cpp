#include "perfpred/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "perfpred/errors.hpp"
#include "perfpred/version.hpp"

namespace perfpred {

using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::Np2m2: return "np2m2";
        case Method::RrmLr: return "rrm_lr";
        case Method::RgdLr: return "rgd_lr";
    }
    return "?";
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + path + it.key() + "'");
    }
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing key '" + path + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError("'" + path + "' must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError("'" + path + "' must be an integer");
    return v.get<int>();
}

bool as_bool(const json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError("'" + path + "' must be a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError("'" + path + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
        return out;
    }
    if (!v.is_array() || v.empty())
        throw ConfigError("'" + path + "' must be a number or non-empty array");
    for (const auto& e : v) out.push_back(as_number(e, path));
    return out;
}

DatasetConfig parse_dataset(const json& obj) {
    if (!obj.is_object()) throw ConfigError("'dataset' must be an object");
    DatasetConfig ds;
    const std::string kind = as_string(require(obj, "kind", "dataset."), "dataset.kind");
    if (kind == "linear_synthetic") {
        ds.kind = DatasetKind::LinearSynthetic;
        reject_unknown_keys(obj,
                            {"kind", "name", "n_per_class", "dim", "n_informative",
                             "class_sep"},
                            "dataset.");
        ds.n_per_class = as_int(require(obj, "n_per_class", "dataset."),
                                "dataset.n_per_class");
        ds.dim = as_int(require(obj, "dim", "dataset."), "dataset.dim");
        ds.n_informative = as_int(require(obj, "n_informative", "dataset."),
                                  "dataset.n_informative");
        ds.class_sep = obj.contains("class_sep")
                           ? as_number(obj["class_sep"], "dataset.class_sep")
                           : 1.0;
    } else if (kind == "circles") {
        ds.kind = DatasetKind::Circles;
        reject_unknown_keys(obj, {"kind", "name", "n_per_class", "noise_std"},
                            "dataset.");
        ds.n_per_class = as_int(require(obj, "n_per_class", "dataset."),
                                "dataset.n_per_class");
        ds.noise_std = as_number(require(obj, "noise_std", "dataset."),
                                 "dataset.noise_std");
    } else if (kind == "csv") {
        ds.kind = DatasetKind::Csv;
        reject_unknown_keys(obj,
                            {"kind", "name", "path", "label_column", "positive_label",
                             "feature_columns", "nearmiss", "nearmiss_k",
                             "nearmiss_minority_label"},
                            "dataset.");
        ds.path = as_string(require(obj, "path", "dataset."), "dataset.path");
        ds.label_column = as_string(require(obj, "label_column", "dataset."),
                                    "dataset.label_column");
        ds.positive_label = as_string(require(obj, "positive_label", "dataset."),
                                      "dataset.positive_label");
        if (obj.contains("feature_columns")) {
            const json& fc = obj["feature_columns"];
            if (!fc.is_array())
                throw ConfigError("'dataset.feature_columns' must be an array");
            for (const auto& e : fc)
                ds.feature_columns.push_back(
                    as_string(e, "dataset.feature_columns[]"));
        }
        if (obj.contains("nearmiss"))
            ds.nearmiss = as_bool(obj["nearmiss"], "dataset.nearmiss");
        if (obj.contains("nearmiss_k"))
            ds.nearmiss_k = as_int(obj["nearmiss_k"], "dataset.nearmiss_k");
        if (obj.contains("nearmiss_minority_label"))
            ds.nearmiss_minority_label = as_int(obj["nearmiss_minority_label"],
                                                "dataset.nearmiss_minority_label");
    } else {
        throw ConfigError("'dataset.kind' must be one of linear_synthetic, circles, csv");
    }
    ds.name = obj.contains("name") ? as_string(obj["name"], "dataset.name") : kind;
    return ds;
}

KernelSpec parse_kernel(const json& obj) {
    if (!obj.is_object()) throw ConfigError("'kernel' must be an object");
    KernelSpec spec;
    const std::string kind = as_string(require(obj, "kind", "kernel."), "kernel.kind");
    if (kind == "linear") {
        reject_unknown_keys(obj, {"kind"}, "kernel.");
        spec.kind = KernelKind::Linear;
    } else if (kind == "rbf") {
        reject_unknown_keys(obj, {"kind", "sigma", "squared_exponent"}, "kernel.");
        spec.kind = KernelKind::Rbf;
        spec.sigma = as_number(require(obj, "sigma", "kernel."), "kernel.sigma");
        if (!(spec.sigma > 0.0)) throw ConfigError("'kernel.sigma' must be > 0");
        if (obj.contains("squared_exponent"))
            spec.squared_exponent =
                as_bool(obj["squared_exponent"], "kernel.squared_exponent");
    } else {
        throw ConfigError("'kernel.kind' must be linear or rbf");
    }
    return spec;
}

MapConfig parse_map(const json& obj) {
    if (!obj.is_object()) throw ConfigError("'map' must be an object");
    MapConfig map;
    const std::string kind = as_string(require(obj, "kind", "map."), "map.kind");
    std::set<std::string> allowed = {"kind", "d"};
    if (kind == "feature_linear") {
        map.kind = MapKind::FeatureLinear;
        allowed.insert("n_candidates");
    } else if (kind == "feature_simulated") {
        map.kind = MapKind::FeatureSimulated;
        allowed.insert("n_candidates");
    } else if (kind == "label_flip") {
        map.kind = MapKind::LabelFlip;
        allowed.insert("positive_flip_exponent");
    } else if (kind == "bankruptcy") {
        map.kind = MapKind::Bankruptcy;
        allowed.insert({"b", "n_candidates", "performative_columns",
                        "positive_flip_exponent"});
    } else {
        throw ConfigError(
            "'map.kind' must be one of feature_linear, feature_simulated, "
            "label_flip, bankruptcy");
    }
    reject_unknown_keys(obj, allowed, "map.");

    map.d_values = as_number_list(require(obj, "d", "map."), "map.d");
    for (double d : map.d_values)
        if (!(d >= 0.0)) throw ConfigError("'map.d' values must be >= 0");
    if (obj.contains("b")) {
        map.b_values = as_number_list(obj["b"], "map.b");
        if (map.b_values.size() != map.d_values.size())
            throw ConfigError("'map.b' must have one value per 'map.d' value");
    }
    if (obj.contains("n_candidates")) {
        map.n_candidates = as_int(obj["n_candidates"], "map.n_candidates");
        if (map.n_candidates < 1)
            throw ConfigError("'map.n_candidates' must be >= 1");
    }
    if (obj.contains("positive_flip_exponent"))
        map.positive_flip_exponent =
            as_bool(obj["positive_flip_exponent"], "map.positive_flip_exponent");
    if (map.kind == MapKind::Bankruptcy) {
        const json& cols = require(obj, "performative_columns", "map.");
        if (!cols.is_array() || cols.empty())
            throw ConfigError("'map.performative_columns' must be a non-empty array");
        for (const auto& e : cols) {
            int c = as_int(e, "map.performative_columns[]");
            if (c < 0) throw ConfigError("'map.performative_columns' must be >= 0");
            map.performative_columns.push_back(c);
        }
    }
    return map;
}

void validate_config(const ExperimentConfig& config) {
    if (config.output_dir.empty()) throw ConfigError("'output_dir' must be non-empty");
    if (!(config.tau > 0.0)) throw ConfigError("'tau' must be > 0");
    if (config.methods.empty()) throw ConfigError("'methods' must be non-empty");
    if (!(config.rrm.alpha > 0.0 && config.rrm.alpha < 0.5))
        throw ConfigError("'rrm.alpha' must lie in (0, 0.5)");
    if (config.rrm.T_max < 1) throw ConfigError("'rrm.T_max' must be >= 1");
    if (config.rrm.trials < 1) throw ConfigError("'rrm.trials' must be >= 1");
    if (config.rrm.burn_in < 0 || config.rrm.burn_in >= config.rrm.T_max)
        throw ConfigError("'rrm.burn_in' must satisfy 0 <= burn_in < T_max");
    if (!(config.rrm.C_init > 0.0)) throw ConfigError("'rrm.C_init' must be > 0");
    if (!(config.solver.tol > 0.0)) throw ConfigError("'solver.tol' must be > 0");
    if (config.solver.max_passes < 1)
        throw ConfigError("'solver.max_passes' must be >= 1");
    if (!(config.baseline.l2 >= 0.0)) throw ConfigError("'baseline.l2' must be >= 0");
    if (!(config.baseline.lr > 0.0)) throw ConfigError("'baseline.lr' must be > 0");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
    reject_unknown_keys(root,
                        {"seed", "output_dir", "tau", "dataset", "kernel", "map",
                         "methods", "rrm", "solver", "baseline", "version"},
                        "");

    ExperimentConfig config;
    config.seed = static_cast<std::uint64_t>(
        require(root, "seed", "").get<std::uint64_t>());
    config.output_dir = as_string(require(root, "output_dir", ""), "output_dir");
    if (root.contains("tau")) config.tau = as_number(root["tau"], "tau");
    config.dataset = parse_dataset(require(root, "dataset", ""));
    config.kernel = parse_kernel(require(root, "kernel", ""));
    config.map = parse_map(require(root, "map", ""));

    const json& methods = require(root, "methods", "");
    if (!methods.is_array() || methods.empty())
        throw ConfigError("'methods' must be a non-empty array");
    for (const auto& m : methods) {
        const std::string name = as_string(m, "methods[]");
        if (name == "np2m2")
            config.methods.push_back(Method::Np2m2);
        else if (name == "rrm_lr")
            config.methods.push_back(Method::RrmLr);
        else if (name == "rgd_lr")
            config.methods.push_back(Method::RgdLr);
        else
            throw ConfigError("unknown method '" + name + "'");
    }

    const json& rrm = require(root, "rrm", "");
    if (!rrm.is_object()) throw ConfigError("'rrm' must be an object");
    reject_unknown_keys(rrm,
                        {"alpha", "T_max", "trials", "burn_in", "C_init",
                         "convergence_consistency", "violator_filter"},
                        "rrm.");
    config.rrm.alpha = as_number(require(rrm, "alpha", "rrm."), "rrm.alpha");
    config.rrm.T_max = as_int(require(rrm, "T_max", "rrm."), "rrm.T_max");
    config.rrm.trials = as_int(require(rrm, "trials", "rrm."), "rrm.trials");
    if (rrm.contains("burn_in"))
        config.rrm.burn_in = as_int(rrm["burn_in"], "rrm.burn_in");
    if (rrm.contains("C_init"))
        config.rrm.C_init = as_number(rrm["C_init"], "rrm.C_init");
    if (rrm.contains("convergence_consistency"))
        config.rrm.convergence_consistency =
            as_number(rrm["convergence_consistency"], "rrm.convergence_consistency");
    if (rrm.contains("violator_filter")) {
        const std::string f = as_string(rrm["violator_filter"], "rrm.violator_filter");
        if (f == "previous")
            config.rrm.violator_filter = ViolatorFilter::Previous;
        else if (f == "current")
            config.rrm.violator_filter = ViolatorFilter::Current;
        else
            throw ConfigError("'rrm.violator_filter' must be previous or current");
    }

    if (root.contains("solver")) {
        const json& solver = root["solver"];
        if (!solver.is_object()) throw ConfigError("'solver' must be an object");
        reject_unknown_keys(solver, {"tol", "max_passes", "shrink"}, "solver.");
        if (solver.contains("tol"))
            config.solver.tol = as_number(solver["tol"], "solver.tol");
        if (solver.contains("max_passes"))
            config.solver.max_passes = as_int(solver["max_passes"], "solver.max_passes");
        if (solver.contains("shrink"))
            config.solver.shrink = as_bool(solver["shrink"], "solver.shrink");
    }

    if (root.contains("baseline")) {
        const json& bl = root["baseline"];
        if (!bl.is_object()) throw ConfigError("'baseline' must be an object");
        reject_unknown_keys(bl, {"l2", "lr", "max_iters", "tol"}, "baseline.");
        if (bl.contains("l2")) config.baseline.l2 = as_number(bl["l2"], "baseline.l2");
        if (bl.contains("lr")) config.baseline.lr = as_number(bl["lr"], "baseline.lr");
        if (bl.contains("max_iters"))
            config.baseline.max_iters = as_int(bl["max_iters"], "baseline.max_iters");
        if (bl.contains("tol"))
            config.baseline.tol = as_number(bl["tol"], "baseline.tol");
    }

    validate_config(config);
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string config_snapshot_json(const ExperimentConfig& config) {
    json root;
    root["version"] = kVersion;
    root["seed"] = config.seed;
    root["output_dir"] = config.output_dir;
    root["tau"] = config.tau;

    json ds;
    switch (config.dataset.kind) {
        case DatasetKind::LinearSynthetic:
            ds["kind"] = "linear_synthetic";
            ds["n_per_class"] = config.dataset.n_per_class;
            ds["dim"] = config.dataset.dim;
            ds["n_informative"] = config.dataset.n_informative;
            ds["class_sep"] = config.dataset.class_sep;
            break;
        case DatasetKind::Circles:
            ds["kind"] = "circles";
            ds["n_per_class"] = config.dataset.n_per_class;
            ds["noise_std"] = config.dataset.noise_std;
            break;
        case DatasetKind::Csv:
            ds["kind"] = "csv";
            ds["path"] = config.dataset.path;
            ds["label_column"] = config.dataset.label_column;
            ds["positive_label"] = config.dataset.positive_label;
            if (!config.dataset.feature_columns.empty())
                ds["feature_columns"] = config.dataset.feature_columns;
            ds["nearmiss"] = config.dataset.nearmiss;
            ds["nearmiss_k"] = config.dataset.nearmiss_k;
            ds["nearmiss_minority_label"] = config.dataset.nearmiss_minority_label;
            break;
    }
    ds["name"] = config.dataset.name;
    root["dataset"] = ds;

    json kernel;
    if (config.kernel.kind == KernelKind::Linear) {
        kernel["kind"] = "linear";
    } else {
        kernel["kind"] = "rbf";
        kernel["sigma"] = config.kernel.sigma;
        kernel["squared_exponent"] = config.kernel.squared_exponent;
    }
    root["kernel"] = kernel;

    json map;
    switch (config.map.kind) {
        case MapKind::FeatureLinear: map["kind"] = "feature_linear"; break;
        case MapKind::FeatureSimulated: map["kind"] = "feature_simulated"; break;
        case MapKind::LabelFlip: map["kind"] = "label_flip"; break;
        case MapKind::Bankruptcy: map["kind"] = "bankruptcy"; break;
    }
    map["d"] = config.map.d_values;
    if (!config.map.b_values.empty()) map["b"] = config.map.b_values;
    if (config.map.kind == MapKind::FeatureLinear ||
        config.map.kind == MapKind::FeatureSimulated ||
        config.map.kind == MapKind::Bankruptcy)
        map["n_candidates"] = config.map.n_candidates;
    if (config.map.kind == MapKind::LabelFlip ||
        config.map.kind == MapKind::Bankruptcy)
        map["positive_flip_exponent"] = config.map.positive_flip_exponent;
    if (config.map.kind == MapKind::Bankruptcy)
        map["performative_columns"] = config.map.performative_columns;
    root["map"] = map;

    json methods = json::array();
    for (Method m : config.methods) methods.push_back(method_name(m));
    root["methods"] = methods;

    json rrm;
    rrm["alpha"] = config.rrm.alpha;
    rrm["T_max"] = config.rrm.T_max;
    rrm["trials"] = config.rrm.trials;
    rrm["burn_in"] = config.rrm.burn_in;
    rrm["C_init"] = config.rrm.C_init;
    rrm["convergence_consistency"] = config.rrm.convergence_consistency;
    rrm["violator_filter"] =
        config.rrm.violator_filter == ViolatorFilter::Previous ? "previous" : "current";
    root["rrm"] = rrm;

    json solver;
    solver["tol"] = config.solver.tol;
    solver["max_passes"] = config.solver.max_passes;
    solver["shrink"] = config.solver.shrink;
    root["solver"] = solver;

    json baseline;
    baseline["l2"] = config.baseline.l2;
    baseline["lr"] = config.baseline.lr;
    baseline["max_iters"] = config.baseline.max_iters;
    baseline["tol"] = config.baseline.tol;
    root["baseline"] = baseline;

    return root.dump(2) + "\n";
}

ExperimentConfig parse_snapshot_json(const std::string& text) {
    return parse_config_text(text, "config_snapshot.json");
}

}  // namespace perfpred
