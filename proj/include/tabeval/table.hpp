#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tabeval/errors.hpp"
#include "tabeval/matrix.hpp"

namespace tabeval {

enum class ColumnKind { Numeric, Categorical };
enum class ColumnRole { Feature, Label };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::Numeric;
    ColumnRole role = ColumnRole::Feature;

    bool operator==(const ColumnSchema&) const = default;
};

/// Relative frequency of each label category. Proportions cover the whole
/// dictionary, so zero-count categories are represented explicitly.
struct LabelDistribution {
    std::vector<std::string> categories;
    std::vector<double> proportions;
};

/// Strided view over one numeric column of a row-major table.
struct NumericColumnView {
    const double* base = nullptr;
    std::size_t stride = 1;
    std::size_t n = 0;

    double operator[](std::size_t i) const { return base[i * stride]; }
    std::size_t size() const { return n; }
    std::vector<double> to_vector() const {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = (*this)[i];
        return out;
    }
};

struct CategoricalColumnView {
    std::span<const std::int32_t> codes;
    const std::vector<std::string>* dictionary = nullptr;
};

using ColumnView = std::variant<NumericColumnView, CategoricalColumnView>;

/// Immutable column-ordered dataset. Numeric columns live in one row-major
/// matrix; categorical columns are dictionary-encoded per column. All mutation
/// happens by constructing new tables, so sharing across threads is safe.
class Table {
public:
    Table() = default;

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return schema_.size(); }
    const std::vector<ColumnSchema>& schema() const { return schema_; }

    std::optional<std::size_t> find_column(std::string_view name) const;
    std::size_t column_index(std::string_view name) const;  // throws UnknownColumn

    bool has_label() const;
    std::size_t label_index() const;  // throws NoLabelColumn

    ColumnKind kind(std::size_t col) const { return schema_[col].kind; }

    NumericColumnView numeric_column(std::size_t col) const;
    std::span<const std::int32_t> codes(std::size_t col) const;
    const std::vector<std::string>& dictionary(std::size_t col) const;

    /// Contiguous numeric slice of one row (numeric columns only, in schema order).
    std::span<const double> numeric_row(std::size_t i) const {
        return {numeric_.data() + i * numeric_width_, numeric_width_};
    }
    std::size_t numeric_width() const { return numeric_width_; }
    /// Position of a numeric column within numeric_row.
    std::size_t numeric_slot(std::size_t col) const { return slot_[col]; }
    /// Column indices of numeric columns in schema order.
    std::vector<std::size_t> numeric_columns() const;
    std::vector<std::size_t> categorical_columns() const;

    Table select_rows(std::span<const std::size_t> rows) const;
    Table drop_column(std::string_view name) const;
    /// Re-labels: the named column becomes the label, any previous label a feature.
    Table with_label(std::string_view name) const;
    Table without_label_role() const;

    /// Copies numeric feature columns (label excluded) into a dense matrix.
    Matrix numeric_feature_matrix() const;

private:
    friend class TableBuilder;

    std::vector<ColumnSchema> schema_;
    std::vector<double> numeric_;               // n_rows x numeric_width, row-major
    std::size_t numeric_width_ = 0;
    std::vector<std::vector<std::int32_t>> cat_codes_;
    std::vector<std::vector<std::string>> dicts_;
    std::vector<std::size_t> slot_;             // per column: slot in its storage
    std::size_t n_rows_ = 0;
};

/// Accumulates columns, validates the table invariants, and freezes the result.
class TableBuilder {
public:
    TableBuilder& add_numeric(std::string name, std::vector<double> values,
                              ColumnRole role = ColumnRole::Feature);
    /// Dictionary built in first-appearance order of the values.
    TableBuilder& add_categorical(std::string name, const std::vector<std::string>& values,
                                  ColumnRole role = ColumnRole::Feature);
    TableBuilder& add_categorical_coded(std::string name, std::vector<std::int32_t> codes,
                                        std::vector<std::string> dictionary,
                                        ColumnRole role = ColumnRole::Feature);
    Table build();

private:
    Table t_;
    std::vector<std::vector<double>> numeric_pending_;
    std::optional<std::size_t> expected_rows_;
    void check_rows(std::size_t n, const std::string& name);
    void check_name(const std::string& name);
};

ColumnView column_view(const Table& t, std::string_view name);

LabelDistribution label_distribution(const Table& t);

Table vertical_concat(const Table& a, const Table& b);

}  // namespace tabeval
