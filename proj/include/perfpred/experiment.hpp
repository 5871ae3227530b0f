#pragma once

#include <string>
#include <vector>

#include "perfpred/config.hpp"
#include "perfpred/metrics.hpp"

namespace perfpred {

// One summary row, keyed by (dataset, map, d, method, alpha).
struct SummaryRow {
    std::string dataset;
    std::string map;
    double d = 0.0;
    std::string method;
    double alpha = 0.0;
    Summary stats;
};

std::string summary_to_csv(const std::vector<SummaryRow>& rows);

std::string map_kind_name(MapKind kind);

// Builds the base dataset for one (d-index, trial) cell. Synthetic datasets
// are redrawn per cell; CSV datasets are fixed by their file.
Dataset build_base_dataset(const ExperimentConfig& config, int d_index, int trial);

// Runs one (method, d-index, trial) cell and returns its trace.
RrmTrace run_cell(const ExperimentConfig& config, Method method, int d_index,
                  int trial);

std::string trace_filename(Method method, double d, int trial);

// Runs the whole grid (methods x d values x trials), writing one trace CSV
// per cell, summary.csv, and config_snapshot.json into config.output_dir.
// Trials run on `workers` threads (0 = one per hardware core, capped by the
// job count); outputs are byte-deterministic regardless of the worker count.
void run_experiment(const ExperimentConfig& config, int workers = 0);

// Resolves the worker count from the PERFPRED_WORKERS environment variable
// when `requested` is 0.
int resolve_workers(int requested, int jobs);

// Recomputes summary.csv from the trace files in `dir` and compares it to
// the stored copy byte for byte. Returns true when they match; mismatch
// details (row key and contributing trace files) go to `report_out`.
bool audit_output_dir(const std::string& dir, std::string& report_out);

// Swept parameter support: returns the run configs and value labels for
// `sweep`. Throws ConfigError for unknown parameter names or empty values.
std::vector<ExperimentConfig> make_sweep_configs(const ExperimentConfig& base,
                                                 const std::string& parameter,
                                                 const std::vector<double>& values);

}  // namespace perfpred
