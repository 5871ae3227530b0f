#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "perfpred/config.hpp"
#include "perfpred/errors.hpp"
#include "perfpred/experiment.hpp"
#include "perfpred/trace_io.hpp"

using namespace perfpred;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(static_cast<bool>(in));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string smoke_config_text(const std::string& out_dir) {
    return R"({
  "seed": 11,
  "output_dir": ")" + out_dir + R"(",
  "dataset": {"kind": "circles", "n_per_class": 15, "noise_std": 0.2},
  "kernel": {"kind": "rbf", "sigma": 0.5},
  "map": {"kind": "label_flip", "d": [5, 10]},
  "methods": ["np2m2", "rrm_lr"],
  "rrm": {"alpha": 0.49, "T_max": 6, "trials": 2, "burn_in": 1},
  "solver": {"tol": 1e-6, "max_passes": 500}
})";
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("configs parse with defaults and strict keys") {
    const ExperimentConfig config =
        parse_config_text(smoke_config_text("/tmp/x"), "test");
    CHECK(config.seed == 11);
    CHECK(config.dataset.kind == DatasetKind::Circles);
    CHECK(config.kernel.kind == KernelKind::Rbf);
    CHECK(config.kernel.sigma == 0.5);
    CHECK(config.kernel.squared_exponent == false);
    CHECK(config.map.kind == MapKind::LabelFlip);
    CHECK(config.map.d_values == std::vector<double>{5.0, 10.0});
    CHECK(config.methods.size() == 2);
    CHECK(config.rrm.burn_in == 1);
    CHECK(config.rrm.C_init == 1.0);
    CHECK(config.solver.max_passes == 500);
    CHECK(config.baseline.l2 == 1e-3);
}

TEST_CASE("alpha outside the stable regime is rejected") {
    std::string text = smoke_config_text("/tmp/x");
    const auto pos = text.find("0.49");
    text.replace(pos, 4, "0.60");
    CHECK_THROWS_WITH_AS(parse_config_text(text, "test"),
                         doctest::Contains("alpha"), ConfigError);
}

TEST_CASE("unknown keys are rejected with their path") {
    std::string text = R"({
  "seed": 1,
  "output_dir": "/tmp/x",
  "dataset": {"kind": "circles", "n_per_class": 5, "noise_std": 0.1, "bogus": 3},
  "kernel": {"kind": "linear"},
  "map": {"kind": "label_flip", "d": 5},
  "methods": ["np2m2"],
  "rrm": {"alpha": 0.4, "T_max": 4, "trials": 1, "burn_in": 1}
})";
    CHECK_THROWS_WITH_AS(parse_config_text(text, "test"),
                         doctest::Contains("dataset.bogus"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json", "test"), ConfigError);
}

TEST_CASE("bankruptcy map config needs its mask columns") {
    std::string text = R"({
  "seed": 1,
  "output_dir": "/tmp/x",
  "dataset": {"kind": "circles", "n_per_class": 5, "noise_std": 0.1},
  "kernel": {"kind": "linear"},
  "map": {"kind": "bankruptcy", "d": [100]},
  "methods": ["np2m2"],
  "rrm": {"alpha": 0.4, "T_max": 4, "trials": 1, "burn_in": 1}
})";
    CHECK_THROWS_WITH_AS(parse_config_text(text, "test"),
                         doctest::Contains("performative_columns"), ConfigError);
}

TEST_CASE("snapshots round-trip to the same bytes") {
    const ExperimentConfig config =
        parse_config_text(smoke_config_text("/tmp/x"), "test");
    const std::string snap = config_snapshot_json(config);
    const ExperimentConfig reparsed = parse_snapshot_json(snap);
    CHECK(config_snapshot_json(reparsed) == snap);
}

TEST_CASE("trace CSVs round-trip through the 12-digit format") {
    RrmTrace trace;
    for (int t = 1; t <= 3; ++t) {
        RrmRecord r;
        r.t = t;
        r.epsilon = 0.123456789012345 * t;
        r.epsilon_bar = 1e-9 / t;
        r.C = 400.0 + t;
        r.accuracy = 0.975;
        r.consistency = -0.25 + t * 0.1;
        r.model_gap = 1.5e-7;
        r.dual_gap = 2.25e-12;
        r.n = 500;
        trace.rows.push_back(r);
    }
    const fs::path dir = temp_dir("pp_trace_io");
    const std::string path = (dir / "t.csv").string();
    write_trace_csv(path, trace);
    const RrmTrace back = read_trace_csv(path);
    REQUIRE(back.rows.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(back.rows[i].t == trace.rows[i].t);
        CHECK(back.rows[i].epsilon ==
              doctest::Approx(trace.rows[i].epsilon).epsilon(1e-11));
        CHECK(back.rows[i].n == 500);
    }
    CHECK_THROWS_AS(read_trace_csv((dir / "missing.csv").string()), IngestionError);
}

TEST_CASE("run_experiment writes traces, snapshot, and summary deterministically") {
    const fs::path out_a = temp_dir("pp_exp_a");
    const fs::path out_b = temp_dir("pp_exp_b");

    ExperimentConfig config =
        parse_config_text(smoke_config_text(out_a.string()), "test");
    run_experiment(config, 2);

    CHECK(fs::exists(out_a / "summary.csv"));
    CHECK(fs::exists(out_a / "config_snapshot.json"));
    int traces = 0;
    for (const auto& entry : fs::directory_iterator(out_a))
        if (entry.path().filename().string().rfind("trace_", 0) == 0) ++traces;
    CHECK(traces == 8);  // 2 methods x 2 d values x 2 trials

    // Summary: one row per (method, d).
    const std::string summary = read_file(out_a / "summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 5);

    config.output_dir = out_b.string();
    run_experiment(config, 1);  // different worker count, same bytes
    CHECK(read_file(out_b / "summary.csv") == summary);
    const std::string name = trace_filename(Method::Np2m2, 5.0, 0);
    CHECK(read_file(out_b / name) == read_file(out_a / name));

    std::string report;
    CHECK(audit_output_dir(out_a.string(), report));

    // Tamper with one post-burn-in accuracy cell; the audit must notice and
    // name the row.
    {
        RrmTrace tampered = read_trace_csv((out_a / name).string());
        tampered.rows.back().accuracy =
            tampered.rows.back().accuracy >= 0.5 ? 0.125 : 0.875;
        write_trace_csv((out_a / name).string(), tampered);
    }
    CHECK(!audit_output_dir(out_a.string(), report));
    CHECK(report.find("np2m2") != std::string::npos);

    CHECK_THROWS_AS(audit_output_dir((out_a / "nope").string(), report),
                    IngestionError);
}

TEST_CASE("sweep configs override one parameter per run") {
    const ExperimentConfig base =
        parse_config_text(smoke_config_text("/tmp/pp_sweep"), "test");

    const auto alphas = make_sweep_configs(base, "alpha", {0.2, 0.3, 0.4, 0.49});
    REQUIRE(alphas.size() == 4);
    CHECK(alphas[0].rrm.alpha == 0.2);
    CHECK(alphas[3].rrm.alpha == 0.49);
    CHECK(alphas[0].output_dir != base.output_dir);

    const auto ds = make_sweep_configs(base, "d", {0.3, 0.5, 0.7});
    REQUIRE(ds.size() == 3);
    CHECK(ds[1].map.d_values == std::vector<double>{0.5});

    CHECK_THROWS_AS(make_sweep_configs(base, "alpha", {}), ConfigError);
    CHECK_THROWS_AS(make_sweep_configs(base, "alpha", {0.7}), ConfigError);
    CHECK_THROWS_AS(make_sweep_configs(base, "nope", {1.0}), ConfigError);
}

TEST_CASE("README-style config files load from disk") {
    const fs::path dir = temp_dir("pp_cfg");
    const fs::path path = dir / "cfg.json";
    {
        std::ofstream out(path, std::ios::binary);
        out << smoke_config_text((dir / "out").string());
    }
    const ExperimentConfig config = load_config(path.string());
    CHECK(config.rrm.trials == 2);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}
