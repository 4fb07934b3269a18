#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabeval/table.hpp"

namespace tabeval {

/// Per-numeric-column median and IQR, fitted on a training table only.
struct RobustScalerParams {
    std::vector<std::string> columns;  // numeric column names, schema order
    std::vector<double> median;
    std::vector<double> iqr;           // Q3 - Q1, type-7 quantiles
    std::vector<bool> constant;        // iqr == 0
};

struct SplitSpec {
    double test_fraction = 0.2;
    std::string stratify_on;
    std::uint64_t seed = 0;
};

struct SchemaHint {
    std::vector<ColumnSchema> columns;
};

struct FoldSplit {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> validation_indices;
};

/// RFC-4180 CSV reader. Header row required; empty cells are rejected.
/// Without a hint, a column is numeric iff every cell parses as a finite real;
/// with a hint, cells of numeric columns that fail to parse raise ParseError.
Table read_csv(const std::string& path, const std::optional<SchemaHint>& hint = std::nullopt);

/// Writes values with the shortest decimal form that round-trips exactly.
void write_csv(const Table& t, const std::string& path);

/// One line per column: `name,kind,role` with kind in {numeric, categorical}
/// and role in {feature, label}.
SchemaHint read_schema_hint(const std::string& path);
void write_schema_hint(const SchemaHint& hint, const std::string& path);

/// Keeps the first occurrence of each full-row duplicate, order preserved.
Table dedupe(const Table& t);

/// Type-7 quantile (linear interpolation of order statistics) of sorted data.
double quantile_type7(std::span<const double> sorted, double p);

RobustScalerParams fit_robust_scaler(const Table& train);

/// x' = (x - median)/IQR; constant columns map to x - median.
Table apply_scaler(const Table& t, const RobustScalerParams& p);

/// Inverse of apply_scaler.
Table unapply_scaler(const Table& t, const RobustScalerParams& p);

std::pair<Table, Table> stratified_split(const Table& t, const SplitSpec& spec);

std::vector<FoldSplit> stratified_kfold(const Table& t, std::size_t k, std::uint64_t seed);

}  // namespace tabeval
