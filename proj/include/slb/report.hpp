#pragma once

#include <string>

#include "slb/experiment.hpp"

namespace slb {

/**
 Serializes a report into `out_dir`:
   replicates.csv, errors_by_lambda.csv, comparisons.csv, aggregate.csv,
   summary.json          -- deterministic: identical seeds give identical bytes
   timings.json          -- wall-clock data, excluded from the determinism contract
 Column layouts are documented in docs/csv_schema.md.
*/
void write_run_report(const RunReport& report, const std::string& out_dir);

void write_rate_study(const RateStudyResult& result, const std::string& out_dir);

void write_baseline_report(const BaselineReport& report, const std::string& out_dir);

void write_diagnostics_report(const DiagnosticsReport& report, const ExperimentConfig& config,
                              const std::string& out_dir);

/// "%.17g" formatting used across all report files (round-trip exact).
std::string format_double(double v);

}  // namespace slb
