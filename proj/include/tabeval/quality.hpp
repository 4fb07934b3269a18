#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tabeval/table.hpp"

namespace tabeval {

struct ColumnShapeScore {
    std::string column;
    std::string metric;  // "ks_complement" or "tv_complement"
    double score;
};

struct PairCorrelationScore {
    std::string column_a;
    std::string column_b;
    double real_correlation;
    double synthetic_correlation;
    double score;
};

struct QualityReport {
    std::vector<ColumnShapeScore> shapes;
    double shapes_average;
    std::vector<PairCorrelationScore> correlations;
    std::size_t correlation_pairs_skipped;  // zero-variance pairs
    double correlation_average;             // 1.0 when no pair is scorable
    double overall;                         // mean of the two averages
};

struct DiagnosticReport {
    double table_structure;
    double boundary_adherence;
    double overall;
};

struct GateConfig {
    double quality_threshold = 0.65;
    double diagnostic_threshold = 0.95;
};

struct GateDecision {
    bool pass;
    std::vector<std::string> reasons;  // empty on pass
};

/// 1 - sup_x |F_real(x) - F_synth(x)| over the pooled sample points.
double ks_complement(std::span<const double> real, std::span<const double> synth);

/// 1 - total variation distance between category frequency vectors; the code
/// spaces of both inputs must refer to the same dictionary.
double tv_complement(std::span<const std::int32_t> real, std::span<const std::int32_t> synth,
                     std::size_t n_categories);

/// Pairwise Pearson correlation similarity over numeric columns shared by
/// name; each pair scores 1 - |rho_real - rho_synth| / 2.
std::vector<PairCorrelationScore> correlation_similarity(const Table& real, const Table& synth,
                                                         std::size_t* skipped = nullptr);

/// Fraction of columns that match by name and kind, over the union.
double table_structure(const Table& real, const Table& synth);

/// Numeric columns: fraction of synthetic values inside the real min/max
/// range. Categorical: fraction of synthetic values whose category occurs in
/// the real column. Mean over shared columns.
double boundary_adherence(const Table& real, const Table& synth);

QualityReport quality_report(const Table& real, const Table& synth);

DiagnosticReport diagnostic_report(const Table& real, const Table& synth);

GateDecision gate(const QualityReport& q, const DiagnosticReport& d, const GateConfig& cfg = {});

}  // namespace tabeval
