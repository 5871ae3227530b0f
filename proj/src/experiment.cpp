#include "perfpred/experiment.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "perfpred/errors.hpp"
#include "perfpred/rng.hpp"
#include "perfpred/trace_io.hpp"

namespace perfpred {

namespace fs = std::filesystem;

namespace {
constexpr std::uint64_t kDataSalt = 0xDA7A;
constexpr std::uint64_t kRunSalt = 0x5EED;

constexpr const char* kSummaryHeader =
    "dataset,map,d,method,alpha,mean_accuracy,std_accuracy,mean_consistency,"
    "std_consistency,trials,burn_in";
}  // namespace

std::string map_kind_name(MapKind kind) {
    switch (kind) {
        case MapKind::FeatureLinear: return "feature_linear";
        case MapKind::FeatureSimulated: return "feature_simulated";
        case MapKind::LabelFlip: return "label_flip";
        case MapKind::Bankruptcy: return "bankruptcy";
    }
    return "?";
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
    std::string out = kSummaryHeader;
    out.push_back('\n');
    for (const SummaryRow& r : rows) {
        out += r.dataset;
        out.push_back(',');
        out += r.map;
        out.push_back(',');
        out += format_g12(r.d);
        out.push_back(',');
        out += r.method;
        out.push_back(',');
        out += format_g12(r.alpha);
        out.push_back(',');
        out += format_g12(r.stats.mean_accuracy);
        out.push_back(',');
        out += format_g12(r.stats.std_accuracy);
        out.push_back(',');
        out += format_g12(r.stats.mean_consistency);
        out.push_back(',');
        out += format_g12(r.stats.std_consistency);
        out.push_back(',');
        out += std::to_string(r.stats.trials);
        out.push_back(',');
        out += std::to_string(r.stats.burn_in);
        out.push_back('\n');
    }
    return out;
}

Dataset build_base_dataset(const ExperimentConfig& config, int d_index, int trial) {
    const std::uint64_t data_seed =
        derive_seed(config.seed, kDataSalt, static_cast<std::uint64_t>(d_index),
                    static_cast<std::uint64_t>(trial));
    Dataset data;
    switch (config.dataset.kind) {
        case DatasetKind::LinearSynthetic:
            data = gen_linear_synthetic(config.dataset.n_per_class, config.dataset.dim,
                                        config.dataset.n_informative,
                                        config.dataset.class_sep, data_seed);
            break;
        case DatasetKind::Circles:
            data = gen_circles(config.dataset.n_per_class, config.dataset.noise_std,
                               data_seed);
            break;
        case DatasetKind::Csv:
            data = load_csv(config.dataset.path, config.dataset.label_column,
                            config.dataset.positive_label,
                            config.dataset.feature_columns);
            if (config.dataset.nearmiss)
                data = nearmiss3_undersample(data, config.dataset.nearmiss_minority_label,
                                             config.dataset.nearmiss_k, data_seed);
            break;
    }
    data.tau = config.tau;
    data.meta = config.dataset.name;
    return data;
}

namespace {

MapSpec make_map_spec(const ExperimentConfig& config, int d_index, int raw_dim) {
    MapSpec spec;
    spec.kind = config.map.kind;
    spec.d = config.map.d_values.at(d_index);
    spec.n_candidates = config.map.n_candidates;
    spec.positive_flip_exponent = config.map.positive_flip_exponent;
    if (spec.kind == MapKind::Bankruptcy) {
        spec.b = config.map.b_values.empty() ? bankruptcy_intensity(spec.d)
                                             : config.map.b_values.at(d_index);
        PerformativeMask mask;
        mask.performative.assign(raw_dim, false);
        for (int c : config.map.performative_columns) {
            if (c >= raw_dim)
                throw ConfigError("performative column " + std::to_string(c) +
                                  " out of range for width " + std::to_string(raw_dim));
            mask.performative[c] = true;
        }
        spec.mask = mask;
    }
    return spec;
}

}  // namespace

RrmTrace run_cell(const ExperimentConfig& config, Method method, int d_index,
                  int trial) {
    const Dataset base = build_base_dataset(config, d_index, trial);
    const MapSpec map = make_map_spec(config, d_index, base.dim());

    RrmSettings rs = config.rrm;
    rs.seed = derive_seed(config.seed, kRunSalt, static_cast<std::uint64_t>(d_index),
                          static_cast<std::uint64_t>(trial));
    switch (method) {
        case Method::Np2m2:
            return run_rrm(base, config.kernel, map, rs, config.solver);
        case Method::RrmLr:
            return run_rrm_lr(base, map, rs, config.baseline);
        case Method::RgdLr:
            return run_rgd_lr(base, map, rs, config.baseline);
    }
    throw ArgumentError("unknown method");
}

std::string trace_filename(Method method, double d, int trial) {
    char suffix[16];
    std::snprintf(suffix, sizeof(suffix), "t%02d", trial);
    return "trace_" + method_name(method) + "_d" + format_g12(d) + "_" + suffix +
           ".csv";
}

int resolve_workers(int requested, int jobs) {
    int workers = requested;
    if (workers <= 0) {
        if (const char* env = std::getenv("PERFPRED_WORKERS")) {
            workers = std::atoi(env);
        }
    }
    if (workers <= 0)
        workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (workers > jobs) workers = jobs;
    return workers;
}

namespace {

struct Job {
    Method method;
    int d_index;
    int trial;
};

std::vector<SummaryRow> summary_from_traces(const ExperimentConfig& config,
                                            const std::string& dir) {
    std::vector<SummaryRow> rows;
    for (Method method : config.methods) {
        for (std::size_t di = 0; di < config.map.d_values.size(); ++di) {
            std::vector<RrmTrace> traces;
            for (int trial = 0; trial < config.rrm.trials; ++trial) {
                const std::string name =
                    trace_filename(method, config.map.d_values[di], trial);
                traces.push_back(read_trace_csv((fs::path(dir) / name).string()));
            }
            SummaryRow row;
            row.dataset = config.dataset.name;
            row.map = map_kind_name(config.map.kind);
            row.d = config.map.d_values[di];
            row.method = method_name(method);
            row.alpha = config.rrm.alpha;
            row.stats = summarize(traces, config.rrm.burn_in);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace

void run_experiment(const ExperimentConfig& config, int workers) {
    fs::create_directories(config.output_dir);

    std::vector<Job> jobs;
    for (Method method : config.methods)
        for (std::size_t di = 0; di < config.map.d_values.size(); ++di)
            for (int trial = 0; trial < config.rrm.trials; ++trial)
                jobs.push_back({method, static_cast<int>(di), trial});

    std::vector<RrmTrace> results(jobs.size());
    std::vector<std::string> failures(jobs.size());
    std::atomic<std::size_t> next{0};

    const int n_workers = resolve_workers(workers, static_cast<int>(jobs.size()));
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            try {
                results[k] = run_cell(config, jobs[k].method, jobs[k].d_index,
                                      jobs[k].trial);
            } catch (const std::exception& e) {
                failures[k] = e.what();
            }
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    // Persist whatever completed before reporting failures.
    std::string first_failure;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const Job& job = jobs[k];
        if (!failures[k].empty()) {
            if (first_failure.empty())
                first_failure = trace_filename(job.method,
                                               config.map.d_values[job.d_index],
                                               job.trial) +
                                ": " + failures[k];
            continue;
        }
        const std::string name =
            trace_filename(job.method, config.map.d_values[job.d_index], job.trial);
        write_trace_csv((fs::path(config.output_dir) / name).string(), results[k]);
        if (results[k].aborted && first_failure.empty())
            first_failure = name + ": run aborted: " + results[k].abort_reason;
    }
    write_file_atomic((fs::path(config.output_dir) / "config_snapshot.json").string(),
                      config_snapshot_json(config));
    if (!first_failure.empty())
        throw std::runtime_error("experiment cell failed: " + first_failure);

    const std::vector<SummaryRow> rows = summary_from_traces(config, config.output_dir);
    write_file_atomic((fs::path(config.output_dir) / "summary.csv").string(),
                      summary_to_csv(rows));
}

bool audit_output_dir(const std::string& dir, std::string& report_out) {
    const fs::path snapshot_path = fs::path(dir) / "config_snapshot.json";
    std::ifstream snap(snapshot_path, std::ios::binary);
    if (!snap) throw IngestionError("missing " + snapshot_path.string());
    std::ostringstream buf;
    buf << snap.rdbuf();
    const ExperimentConfig config = parse_snapshot_json(buf.str());

    const std::vector<SummaryRow> rows = summary_from_traces(config, dir);
    const std::string recomputed = summary_to_csv(rows);

    const fs::path summary_path = fs::path(dir) / "summary.csv";
    std::ifstream stored_in(summary_path, std::ios::binary);
    if (!stored_in) throw IngestionError("missing " + summary_path.string());
    std::ostringstream stored_buf;
    stored_buf << stored_in.rdbuf();
    const std::string stored = stored_buf.str();

    if (recomputed == stored) {
        report_out = "summary matches traces (" + std::to_string(rows.size()) +
                     " rows audited)";
        return true;
    }

    // Identify the first differing row for the report.
    std::istringstream a(recomputed), b(stored);
    std::string la, lb;
    int line = 0;
    report_out = "summary.csv does not match the trace files";
    while (true) {
        const bool ga = static_cast<bool>(std::getline(a, la));
        const bool gb = static_cast<bool>(std::getline(b, lb));
        if (!ga && !gb) break;
        ++line;
        if (la != lb || ga != gb) {
            std::ostringstream msg;
            msg << "summary.csv line " << line << " differs\n  recomputed: "
                << (ga ? la : "<missing>") << "\n  stored:     "
                << (gb ? lb : "<missing>");
            if (line >= 2 && static_cast<std::size_t>(line - 2) < rows.size()) {
                const SummaryRow& row = rows[line - 2];
                msg << "\n  contributing traces: trace_" << row.method << "_d"
                    << format_g12(row.d) << "_t*.csv";
            }
            report_out = msg.str();
            break;
        }
    }
    return false;
}

std::vector<ExperimentConfig> make_sweep_configs(const ExperimentConfig& base,
                                                 const std::string& parameter,
                                                 const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep values must be non-empty");

    std::vector<ExperimentConfig> configs;
    for (double v : values) {
        ExperimentConfig c = base;
        if (parameter == "alpha") {
            if (!(v > 0.0 && v < 0.5))
                throw ConfigError("swept alpha value " + format_g12(v) +
                                  " outside (0, 0.5)");
            c.rrm.alpha = v;
        } else if (parameter == "d") {
            if (!(v >= 0.0))
                throw ConfigError("swept d value must be >= 0");
            c.map.d_values = {v};
            c.map.b_values.clear();  // bankruptcy b falls back to its d-rule
        } else if (parameter == "C_init") {
            if (!(v > 0.0)) throw ConfigError("swept C_init value must be > 0");
            c.rrm.C_init = v;
        } else if (parameter == "sigma") {
            if (c.kernel.kind != KernelKind::Rbf)
                throw ConfigError("sigma sweep requires an rbf kernel");
            if (!(v > 0.0)) throw ConfigError("swept sigma value must be > 0");
            c.kernel.sigma = v;
        } else {
            throw ConfigError("unknown sweep parameter '" + parameter +
                              "' (supported: alpha, d, C_init, sigma)");
        }
        c.output_dir = (fs::path(base.output_dir) /
                        (parameter + "_" + format_g12(v)))
                           .string();
        configs.push_back(c);
    }
    return configs;
}

}  // namespace perfpred
