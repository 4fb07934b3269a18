#include "tabeval/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "tabeval/errors.hpp"
#include "tabeval/rng.hpp"

namespace tabeval {
namespace {

struct RawCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC-4180 state machine; quoted fields may contain commas, quotes (doubled)
// and newlines. Accepts both LF and CRLF endings.
RawCsv parse_csv_text(const std::string& text, const std::string& path) {
    RawCsv out;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;
    std::size_t record_no = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (out.header.empty()) {
            out.header = std::move(record);
        } else {
            if (record.size() != out.header.size()) throw RaggedRow(record_no);
            out.rows.push_back(std::move(record));
        }
        record.clear();
        record_started = false;
        ++record_no;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                field_started = true;
                record_started = true;
                break;
            case ',':
                end_field();
                record_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (record_started || field_started || !field.empty() || !record.empty()) end_record();
                break;
            default:
                field += c;
                field_started = true;
                record_started = true;
                break;
        }
    }
    if (in_quotes) throw ParseError(record_no, "(csv)", "unterminated quoted field");
    if (record_started || !field.empty() || !record.empty()) end_record();
    if (out.header.empty()) throw EmptyFile(path);
    return out;
}

bool parse_finite(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;  // from_chars rejects a leading plus
    if (first == last) return false;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += '"';
    return q;
}

// Shortest %.{k}g form that parses back to exactly v.
std::string format_roundtrip(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        if (parse_finite(buf, back) && back == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 12) + (h >> 4);
    return h;
}

// Round half to even, independent of the floating-point environment.
std::size_t round_half_even(double x) {
    double fl = std::floor(x);
    double frac = x - fl;
    if (frac > 0.5) return static_cast<std::size_t>(fl) + 1;
    if (frac < 0.5) return static_cast<std::size_t>(fl);
    auto lo = static_cast<std::size_t>(fl);
    return (lo % 2 == 0) ? lo : lo + 1;
}

}  // namespace

Table read_csv(const std::string& path, const std::optional<SchemaHint>& hint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmptyFile(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    RawCsv raw = parse_csv_text(ss.str(), path);

    const std::size_t n_cols = raw.header.size();
    const std::size_t n_rows = raw.rows.size();

    // Reject missing values up front so inference never sees them.
    for (std::size_t r = 0; r < n_rows; ++r)
        for (std::size_t c = 0; c < n_cols; ++c)
            if (raw.rows[r][c].empty()) throw MissingValue(r + 2, raw.header[c]);

    std::vector<ColumnSchema> schema(n_cols);
    for (std::size_t c = 0; c < n_cols; ++c) {
        schema[c].name = raw.header[c];
        schema[c].role = ColumnRole::Feature;
    }
    if (hint) {
        std::unordered_map<std::string, const ColumnSchema*> by_name;
        for (const auto& h : hint->columns) by_name[h.name] = &h;
        for (auto& col : schema) {
            auto it = by_name.find(col.name);
            if (it == by_name.end())
                throw SchemaMismatch("column '" + col.name + "' not covered by schema hint");
            col.kind = it->second->kind;
            col.role = it->second->role;
        }
    } else {
        for (std::size_t c = 0; c < n_cols; ++c) {
            bool all_numeric = n_rows > 0;
            double v;
            for (std::size_t r = 0; r < n_rows && all_numeric; ++r)
                all_numeric = parse_finite(raw.rows[r][c], v);
            schema[c].kind = all_numeric ? ColumnKind::Numeric : ColumnKind::Categorical;
        }
    }

    TableBuilder b;
    for (std::size_t c = 0; c < n_cols; ++c) {
        const auto& col = schema[c];
        if (col.kind == ColumnKind::Numeric) {
            std::vector<double> values(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (!parse_finite(raw.rows[r][c], values[r]))
                    throw ParseError(r + 2, col.name, raw.rows[r][c]);
            }
            b.add_numeric(col.name, std::move(values), col.role);
        } else {
            std::vector<std::string> values(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) values[r] = raw.rows[r][c];
            b.add_categorical(col.name, values, col.role);
        }
    }
    return std::move(b).build();
}

void write_csv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        if (c) out << ',';
        out << csv_quote(t.schema()[c].name);
    }
    out << '\n';
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        for (std::size_t c = 0; c < t.n_cols(); ++c) {
            if (c) out << ',';
            if (t.kind(c) == ColumnKind::Numeric) {
                out << format_roundtrip(t.numeric_column(c)[r]);
            } else {
                out << csv_quote(t.dictionary(c)[static_cast<std::size_t>(t.codes(c)[r])]);
            }
        }
        out << '\n';
    }
}

SchemaHint read_schema_hint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EmptyFile(path);
    SchemaHint hint;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t a = line.find(',');
        std::size_t b = line.find(',', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos)
            throw ParseError(line_no, "schema", line);
        ColumnSchema col;
        col.name = line.substr(0, a);
        std::string kind = line.substr(a + 1, b - a - 1);
        std::string role = line.substr(b + 1);
        if (kind == "numeric") col.kind = ColumnKind::Numeric;
        else if (kind == "categorical") col.kind = ColumnKind::Categorical;
        else throw ParseError(line_no, "schema", line);
        if (role == "feature") col.role = ColumnRole::Feature;
        else if (role == "label") col.role = ColumnRole::Label;
        else throw ParseError(line_no, "schema", line);
        hint.columns.push_back(std::move(col));
    }
    if (hint.columns.empty()) throw EmptyFile(path);
    return hint;
}

void write_schema_hint(const SchemaHint& hint, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    for (const auto& c : hint.columns) {
        out << c.name << ','
            << (c.kind == ColumnKind::Numeric ? "numeric" : "categorical") << ','
            << (c.role == ColumnRole::Label ? "label" : "feature") << '\n';
    }
}

Table dedupe(const Table& t) {
    const std::size_t n = t.n_rows();
    std::vector<std::uint64_t> row_hash(n, 1469598103934665603ULL);
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        if (t.kind(c) == ColumnKind::Numeric) {
            auto col = t.numeric_column(c);
            for (std::size_t r = 0; r < n; ++r) {
                std::uint64_t bits;
                double v = col[r];
                static_assert(sizeof(bits) == sizeof(v));
                std::memcpy(&bits, &v, sizeof(bits));
                row_hash[r] = hash_combine(row_hash[r], bits);
            }
        } else {
            auto codes = t.codes(c);
            for (std::size_t r = 0; r < n; ++r)
                row_hash[r] = hash_combine(row_hash[r], static_cast<std::uint64_t>(codes[r]) + 0x51ed);
        }
    }

    auto rows_equal = [&](std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < t.n_cols(); ++c) {
            if (t.kind(c) == ColumnKind::Numeric) {
                if (t.numeric_column(c)[a] != t.numeric_column(c)[b]) return false;
            } else {
                if (t.codes(c)[a] != t.codes(c)[b]) return false;
            }
        }
        return true;
    };

    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto& bucket = buckets[row_hash[r]];
        bool dup = false;
        for (std::size_t prev : bucket)
            if (rows_equal(prev, r)) { dup = true; break; }
        if (!dup) {
            bucket.push_back(r);
            keep.push_back(r);
        }
    }
    return t.select_rows(keep);
}

double quantile_type7(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptyColumn("quantile of empty data");
    if (sorted.size() == 1) return sorted[0];
    double h = p * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo >= sorted.size() - 1) return sorted[sorted.size() - 1];
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

RobustScalerParams fit_robust_scaler(const Table& train) {
    auto numeric = train.numeric_columns();
    if (numeric.empty()) throw NoNumericColumns();
    if (train.n_rows() == 0) throw EmptyColumn("cannot fit scaler on empty table");
    RobustScalerParams p;
    for (std::size_t c : numeric) {
        std::vector<double> values = train.numeric_column(c).to_vector();
        std::sort(values.begin(), values.end());
        double med = quantile_type7(values, 0.5);
        double iqr = quantile_type7(values, 0.75) - quantile_type7(values, 0.25);
        p.columns.push_back(train.schema()[c].name);
        p.median.push_back(med);
        p.iqr.push_back(iqr);
        p.constant.push_back(iqr == 0.0);
    }
    return p;
}

namespace {

Table transform_numerics(const Table& t, const RobustScalerParams& p, bool inverse) {
    auto numeric = t.numeric_columns();
    if (numeric.size() != p.columns.size())
        throw SchemaMismatch("scaler fitted on " + std::to_string(p.columns.size()) +
                             " numeric columns, table has " + std::to_string(numeric.size()));
    for (std::size_t i = 0; i < numeric.size(); ++i)
        if (t.schema()[numeric[i]].name != p.columns[i])
            throw SchemaMismatch("scaler column '" + p.columns[i] + "' does not match table column '" +
                                 t.schema()[numeric[i]].name + "'");

    TableBuilder b;
    std::size_t slot = 0;
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        const auto& col = t.schema()[c];
        if (t.kind(c) == ColumnKind::Numeric) {
            std::vector<double> values = t.numeric_column(c).to_vector();
            double med = p.median[slot];
            double iqr = p.iqr[slot];
            for (double& v : values) {
                if (inverse) v = p.constant[slot] ? v + med : v * iqr + med;
                else v = p.constant[slot] ? v - med : (v - med) / iqr;
            }
            b.add_numeric(col.name, std::move(values), col.role);
            ++slot;
        } else {
            auto codes = t.codes(c);
            b.add_categorical_coded(col.name, {codes.begin(), codes.end()}, t.dictionary(c),
                                    col.role);
        }
    }
    return std::move(b).build();
}

}  // namespace

Table apply_scaler(const Table& t, const RobustScalerParams& p) {
    return transform_numerics(t, p, false);
}

Table unapply_scaler(const Table& t, const RobustScalerParams& p) {
    return transform_numerics(t, p, true);
}

std::pair<Table, Table> stratified_split(const Table& t, const SplitSpec& spec) {
    std::size_t col = t.column_index(spec.stratify_on);
    if (t.kind(col) != ColumnKind::Categorical)
        throw SchemaMismatch("stratification column '" + spec.stratify_on + "' must be categorical");
    if (spec.test_fraction < 0.0 || spec.test_fraction > 1.0)
        throw DomainError("test_fraction must lie in [0, 1]");

    auto codes = t.codes(col);
    std::size_t n_classes = t.dictionary(col).size();
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        by_class[static_cast<std::size_t>(codes[r])].push_back(r);

    std::uint64_t base = derive_seed(spec.seed, "stratified_split");
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        std::size_t n_test = rows.size() == 1
            ? 0
            : std::min(rows.size(), round_half_even(static_cast<double>(rows.size()) * spec.test_fraction));
        Rng rng(derive_seed(base, static_cast<std::uint64_t>(c)));
        rng.shuffle(rows);
        for (std::size_t i = 0; i < rows.size(); ++i)
            (i < n_test ? test_idx : train_idx).push_back(rows[i]);
    }
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {t.select_rows(train_idx), t.select_rows(test_idx)};
}

std::vector<FoldSplit> stratified_kfold(const Table& t, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > t.n_rows()) throw BadK(k);
    std::size_t col = t.label_index();
    auto codes = t.codes(col);
    std::size_t n_classes = t.dictionary(col).size();
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t r = 0; r < t.n_rows(); ++r)
        by_class[static_cast<std::size_t>(codes[r])].push_back(r);

    std::uint64_t base = derive_seed(seed, "stratified_kfold");
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t c = 0; c < n_classes; ++c) {
        auto& rows = by_class[c];
        if (rows.empty()) continue;
        Rng rng(derive_seed(base, static_cast<std::uint64_t>(c)));
        rng.shuffle(rows);
        // Start dealing at a seeded offset so small classes are not always
        // concentrated in the first folds.
        std::size_t start = static_cast<std::size_t>(rng.below(k));
        for (std::size_t i = 0; i < rows.size(); ++i)
            folds[(start + i) % k].push_back(rows[i]);
    }

    std::vector<FoldSplit> out(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(folds[f].begin(), folds[f].end());
        out[f].validation_indices = folds[f];
        for (std::size_t g = 0; g < k; ++g) {
            if (g == f) continue;
            out[f].train_indices.insert(out[f].train_indices.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(out[f].train_indices.begin(), out[f].train_indices.end());
    }
    return out;
}

}  // namespace tabeval
