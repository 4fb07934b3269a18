#include "tabeval/table.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace tabeval {

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t Table::column_index(std::string_view name) const {
    if (auto i = find_column(name)) return *i;
    throw UnknownColumn(std::string(name));
}

bool Table::has_label() const {
    return std::any_of(schema_.begin(), schema_.end(),
                       [](const ColumnSchema& c) { return c.role == ColumnRole::Label; });
}

std::size_t Table::label_index() const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].role == ColumnRole::Label) return i;
    }
    throw NoLabelColumn();
}

NumericColumnView Table::numeric_column(std::size_t col) const {
    return {numeric_.data() + slot_[col], numeric_width_, n_rows_};
}

std::span<const std::int32_t> Table::codes(std::size_t col) const {
    return cat_codes_[slot_[col]];
}

const std::vector<std::string>& Table::dictionary(std::size_t col) const {
    return dicts_[slot_[col]];
}

std::vector<std::size_t> Table::numeric_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].kind == ColumnKind::Numeric) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> Table::categorical_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].kind == ColumnKind::Categorical) out.push_back(i);
    }
    return out;
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
    Table out;
    out.schema_ = schema_;
    out.slot_ = slot_;
    out.numeric_width_ = numeric_width_;
    out.n_rows_ = rows.size();
    out.numeric_.resize(rows.size() * numeric_width_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double* src = numeric_.data() + rows[i] * numeric_width_;
        std::copy(src, src + numeric_width_, out.numeric_.data() + i * numeric_width_);
    }
    out.dicts_ = dicts_;
    out.cat_codes_.resize(cat_codes_.size());
    for (std::size_t c = 0; c < cat_codes_.size(); ++c) {
        out.cat_codes_[c].resize(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out.cat_codes_[c][i] = cat_codes_[c][rows[i]];
        }
    }
    return out;
}

Table Table::drop_column(std::string_view name) const {
    const std::size_t drop = column_index(name);
    TableBuilder b;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (i == drop) continue;
        const ColumnSchema& c = schema_[i];
        if (c.kind == ColumnKind::Numeric) {
            b.add_numeric(c.name, numeric_column(i).to_vector(), c.role);
        } else {
            auto cd = codes(i);
            b.add_categorical_coded(c.name, {cd.begin(), cd.end()}, dictionary(i), c.role);
        }
    }
    return b.build();
}

Table Table::with_label(std::string_view name) const {
    const std::size_t target = column_index(name);
    Table out = *this;
    for (std::size_t i = 0; i < out.schema_.size(); ++i) {
        out.schema_[i].role = i == target ? ColumnRole::Label : ColumnRole::Feature;
    }
    return out;
}

Table Table::without_label_role() const {
    Table out = *this;
    for (auto& c : out.schema_) c.role = ColumnRole::Feature;
    return out;
}

Matrix Table::numeric_feature_matrix() const {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (schema_[i].kind == ColumnKind::Numeric && schema_[i].role == ColumnRole::Feature) {
            cols.push_back(i);
        }
    }
    Matrix m(n_rows_, cols.size());
    for (std::size_t i = 0; i < n_rows_; ++i) {
        const double* src = numeric_.data() + i * numeric_width_;
        double* dst = m.row(i);
        for (std::size_t j = 0; j < cols.size(); ++j) dst[j] = src[slot_[cols[j]]];
    }
    return m;
}

void TableBuilder::check_rows(std::size_t n, const std::string& name) {
    if (!expected_rows_) {
        expected_rows_ = n;
    } else if (*expected_rows_ != n) {
        throw ShapeMismatch("column \"" + name + "\" has " + std::to_string(n)
                            + " rows, expected " + std::to_string(*expected_rows_));
    }
}

void TableBuilder::check_name(const std::string& name) {
    for (const auto& c : t_.schema_) {
        if (c.name == name) throw SchemaMismatch("duplicate column name \"" + name + "\"");
    }
}

TableBuilder& TableBuilder::add_numeric(std::string name, std::vector<double> values,
                                        ColumnRole role) {
    check_name(name);
    check_rows(values.size(), name);
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ShapeMismatch("non-finite value in numeric column \"" + name + "\"");
        }
    }
    t_.schema_.push_back({std::move(name), ColumnKind::Numeric, role});
    t_.slot_.push_back(0);  // fixed up in build()
    numeric_pending_.push_back(std::move(values));
    return *this;
}

TableBuilder& TableBuilder::add_categorical(std::string name,
                                            const std::vector<std::string>& values,
                                            ColumnRole role) {
    std::vector<std::string> dict;
    std::unordered_map<std::string, std::int32_t> index;
    std::vector<std::int32_t> codes;
    codes.reserve(values.size());
    for (const auto& v : values) {
        auto [it, inserted] = index.try_emplace(v, static_cast<std::int32_t>(dict.size()));
        if (inserted) dict.push_back(v);
        codes.push_back(it->second);
    }
    return add_categorical_coded(std::move(name), std::move(codes), std::move(dict), role);
}

TableBuilder& TableBuilder::add_categorical_coded(std::string name,
                                                  std::vector<std::int32_t> codes,
                                                  std::vector<std::string> dictionary,
                                                  ColumnRole role) {
    check_name(name);
    check_rows(codes.size(), name);
    for (std::int32_t c : codes) {
        if (c < 0 || static_cast<std::size_t>(c) >= dictionary.size()) {
            throw ShapeMismatch("code out of dictionary range in column \"" + name + "\"");
        }
    }
    t_.schema_.push_back({std::move(name), ColumnKind::Categorical, role});
    t_.slot_.push_back(t_.cat_codes_.size());
    t_.cat_codes_.push_back(std::move(codes));
    t_.dicts_.push_back(std::move(dictionary));
    return *this;
}

Table TableBuilder::build() {
    std::size_t labels = 0;
    for (const auto& c : t_.schema_) {
        if (c.role == ColumnRole::Label) ++labels;
    }
    if (labels > 1) throw SchemaMismatch("more than one label column");

    t_.n_rows_ = expected_rows_.value_or(0);
    t_.numeric_width_ = numeric_pending_.size();
    t_.numeric_.resize(t_.n_rows_ * t_.numeric_width_);
    std::size_t slot = 0;
    for (std::size_t i = 0; i < t_.schema_.size(); ++i) {
        if (t_.schema_[i].kind != ColumnKind::Numeric) continue;
        const auto& col = numeric_pending_[slot];
        for (std::size_t r = 0; r < t_.n_rows_; ++r) {
            t_.numeric_[r * t_.numeric_width_ + slot] = col[r];
        }
        t_.slot_[i] = slot++;
    }
    numeric_pending_.clear();
    return std::move(t_);
}

ColumnView column_view(const Table& t, std::string_view name) {
    const std::size_t col = t.column_index(name);
    if (t.kind(col) == ColumnKind::Numeric) return t.numeric_column(col);
    return CategoricalColumnView{t.codes(col), &t.dictionary(col)};
}

LabelDistribution label_distribution(const Table& t) {
    const std::size_t col = t.label_index();
    if (t.kind(col) != ColumnKind::Categorical) {
        throw SchemaMismatch("label column must be categorical");
    }
    const auto& dict = t.dictionary(col);
    LabelDistribution out;
    out.categories = dict;
    out.proportions.assign(dict.size(), 0.0);
    for (std::int32_t c : t.codes(col)) out.proportions[static_cast<std::size_t>(c)] += 1.0;
    const double inv = t.n_rows() > 0 ? 1.0 / static_cast<double>(t.n_rows()) : 0.0;
    for (double& p : out.proportions) p *= inv;
    return out;
}

Table vertical_concat(const Table& a, const Table& b) {
    if (a.n_cols() != b.n_cols()) {
        throw SchemaMismatch("column counts differ: " + std::to_string(a.n_cols()) + " vs "
                             + std::to_string(b.n_cols()));
    }
    for (std::size_t i = 0; i < a.n_cols(); ++i) {
        if (a.schema()[i] != b.schema()[i]) throw SchemaMismatch(a.schema()[i].name);
    }
    TableBuilder out;
    for (std::size_t i = 0; i < a.n_cols(); ++i) {
        const ColumnSchema& c = a.schema()[i];
        if (c.kind == ColumnKind::Numeric) {
            std::vector<double> v = a.numeric_column(i).to_vector();
            const auto vb = b.numeric_column(i);
            for (std::size_t r = 0; r < vb.size(); ++r) v.push_back(vb[r]);
            out.add_numeric(c.name, std::move(v), c.role);
        } else {
            // union dictionary: a's entries first, then b's unseen ones in order
            std::vector<std::string> dict = a.dictionary(i);
            std::unordered_map<std::string, std::int32_t> index;
            for (std::size_t k = 0; k < dict.size(); ++k) {
                index.emplace(dict[k], static_cast<std::int32_t>(k));
            }
            std::vector<std::int32_t> remap(b.dictionary(i).size());
            for (std::size_t k = 0; k < b.dictionary(i).size(); ++k) {
                const std::string& cat = b.dictionary(i)[k];
                auto [it, inserted] =
                    index.try_emplace(cat, static_cast<std::int32_t>(dict.size()));
                if (inserted) dict.push_back(cat);
                remap[k] = it->second;
            }
            auto ca = a.codes(i);
            std::vector<std::int32_t> codes(ca.begin(), ca.end());
            for (std::int32_t c2 : b.codes(i)) codes.push_back(remap[static_cast<std::size_t>(c2)]);
            out.add_categorical_coded(c.name, std::move(codes), std::move(dict), c.role);
        }
    }
    return out.build();
}

}  // namespace tabeval
