#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "perfpred/errors.hpp"
#include "perfpred/experiment.hpp"
#include "perfpred/trace_io.hpp"
#include "perfpred/version.hpp"

namespace fs = std::filesystem;
using namespace perfpred;

namespace {

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            values.push_back(std::stod(item, &pos));
            if (pos != item.size()) throw std::invalid_argument("trailing chars");
        } catch (const std::exception&) {
            throw ConfigError("cannot parse sweep value '" + item + "'");
        }
    }
    if (values.empty()) throw ConfigError("sweep needs a non-empty value list");
    return values;
}

int cmd_run(const std::string& config_path, int workers) {
    const ExperimentConfig config = load_config(config_path);
    run_experiment(config, workers);
    std::cout << "wrote " << config.output_dir << "/summary.csv\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& parameter,
              const std::string& values_csv, int workers) {
    const ExperimentConfig base = load_config(config_path);
    const std::vector<double> values = parse_value_list(values_csv);
    const std::vector<ExperimentConfig> configs =
        make_sweep_configs(base, parameter, values);

    std::string combined;
    for (const ExperimentConfig& config : configs) {
        run_experiment(config, workers);
        std::ifstream in(fs::path(config.output_dir) / "summary.csv",
                         std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        const std::size_t nl = text.find('\n');
        if (combined.empty()) {
            combined = text;
        } else if (nl != std::string::npos) {
            combined += text.substr(nl + 1);
        }
        std::cout << "swept " << parameter << " = "
                  << format_g12(values[&config - configs.data()]) << "\n";
    }
    write_file_atomic((fs::path(base.output_dir) / "summary.csv").string(), combined);
    std::cout << "wrote " << base.output_dir << "/summary.csv\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    std::string report;
    const bool ok = audit_output_dir(dir, report);
    std::cout << report << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Performative prediction experiment runner"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, dir, parameter, values_csv;
    int workers = 0;

    CLI::App* run = app.add_subcommand("run", "Run every cell of an experiment config");
    run->add_option("config", config_path, "Config file (JSON)")->required();
    run->add_option("--workers", workers,
                    "Worker threads (default: PERFPRED_WORKERS or all cores)");

    CLI::App* sweep =
        app.add_subcommand("sweep", "Re-run a config across a parameter grid");
    sweep->add_option("config", config_path, "Config file (JSON)")->required();
    sweep->add_option("--param", parameter, "Parameter name (alpha, d, C_init, sigma)")
        ->required();
    sweep->add_option("--values", values_csv, "Comma-separated value list")->required();
    sweep->add_option("--workers", workers, "Worker threads");

    CLI::App* report =
        app.add_subcommand("report", "Audit summary.csv against the trace files");
    report->add_option("dir", dir, "Output directory of a previous run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, workers);
        if (sweep->parsed()) return cmd_sweep(config_path, parameter, values_csv, workers);
        if (report->parsed()) return cmd_report(dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
