#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tabeval/report.hpp"

namespace tabeval {

struct PipelineConfig {
    std::string real_path;
    std::string synth_path;
    std::string label_column;  // empty: no label, utility section is skipped
    std::string schema_path;   // optional column kind/role hints
    std::string output_dir = ".";
    std::uint64_t seed = 7;
    std::size_t permutations = 500;
    double alpha = 0.05;
    double quality_gate = 0.65;
    double diagnostic_gate = 0.95;
    double stability_band = 0.04;
    std::optional<std::size_t> subsample;  // row cap for the kernel test
    double test_fraction = 0.2;
    bool force = false;  // overwrite existing report files
};

struct PipelineOutcome {
    Json report;
    bool quality_pass = false;
    bool diagnostic_pass = false;
    std::string report_path;
    std::string markdown_path;
};

/// Loads both tables, runs the whole evaluation battery, writes report.json
/// and report.md into output_dir, and returns the assembled report. Apart
/// from the timestamp the report is a pure function of inputs and config.
PipelineOutcome run_full(const PipelineConfig& cfg);

}  // namespace tabeval
