#include "tabeval/quality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "tabeval/errors.hpp"

namespace tabeval {

double ks_complement(std::span<const double> real, std::span<const double> synth) {
    if (real.empty() || synth.empty()) throw EmptyColumn("ks_complement needs non-empty samples");
    std::vector<double> a(real.begin(), real.end());
    std::vector<double> b(synth.begin(), synth.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return 1.0 - d;
}

double tv_complement(std::span<const std::int32_t> real, std::span<const std::int32_t> synth,
                     std::size_t n_categories) {
    if (real.empty() || synth.empty()) throw EmptyColumn("tv_complement needs non-empty samples");
    std::vector<double> p(n_categories, 0.0), q(n_categories, 0.0);
    for (auto c : real) p[static_cast<std::size_t>(c)] += 1.0;
    for (auto c : synth) q[static_cast<std::size_t>(c)] += 1.0;
    double tv = 0.0;
    for (std::size_t c = 0; c < n_categories; ++c)
        tv += std::fabs(p[c] / static_cast<double>(real.size()) - q[c] / static_cast<double>(synth.size()));
    return 1.0 - 0.5 * tv;
}

namespace {

struct SharedColumn {
    std::string name;
    ColumnKind kind;
    std::size_t real_col;
    std::size_t synth_col;
};

std::vector<SharedColumn> shared_columns(const Table& real, const Table& synth) {
    std::vector<SharedColumn> out;
    for (std::size_t c = 0; c < real.n_cols(); ++c) {
        const auto& name = real.schema()[c].name;
        auto s = synth.find_column(name);
        if (!s || synth.kind(*s) != real.kind(c)) continue;
        out.push_back({name, real.kind(c), c, *s});
    }
    return out;
}

// Maps a column pair onto a shared dictionary: real categories first (in
// real's order), then synthetic-only categories.
void align_codes(const Table& real, std::size_t rc, const Table& synth, std::size_t sc,
                 std::vector<std::int32_t>& real_codes, std::vector<std::int32_t>& synth_codes,
                 std::size_t& n_categories) {
    const auto& rdict = real.dictionary(rc);
    const auto& sdict = synth.dictionary(sc);
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < rdict.size(); ++i)
        index.emplace(rdict[i], static_cast<std::int32_t>(i));
    std::vector<std::int32_t> remap(sdict.size());
    for (std::size_t i = 0; i < sdict.size(); ++i) {
        auto it = index.find(sdict[i]);
        if (it == index.end())
            it = index.emplace(sdict[i], static_cast<std::int32_t>(index.size())).first;
        remap[i] = it->second;
    }
    n_categories = index.size();
    auto rcodes = real.codes(rc);
    real_codes.assign(rcodes.begin(), rcodes.end());
    synth_codes.clear();
    for (auto c : synth.codes(sc)) synth_codes.push_back(remap[static_cast<std::size_t>(c)]);
}

double pearson(std::span<const double> x, std::span<const double> y, bool& defined) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) { defined = false; return 0.0; }
    defined = true;
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace

std::vector<PairCorrelationScore> correlation_similarity(const Table& real, const Table& synth,
                                                         std::size_t* skipped) {
    std::vector<SharedColumn> numeric;
    for (const auto& col : shared_columns(real, synth))
        if (col.kind == ColumnKind::Numeric) numeric.push_back(col);
    if (numeric.size() < 2) throw TooFewNumericColumns();
    if (real.n_rows() < 2 || synth.n_rows() < 2)
        throw DegenerateInput("correlation needs at least two rows per table");

    std::size_t skip_count = 0;
    std::vector<PairCorrelationScore> out;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        auto xi = real.numeric_column(numeric[i].real_col).to_vector();
        auto si = synth.numeric_column(numeric[i].synth_col).to_vector();
        for (std::size_t j = i + 1; j < numeric.size(); ++j) {
            auto xj = real.numeric_column(numeric[j].real_col).to_vector();
            auto sj = synth.numeric_column(numeric[j].synth_col).to_vector();
            bool def_r = false, def_s = false;
            double rho_r = pearson(xi, xj, def_r);
            double rho_s = pearson(si, sj, def_s);
            if (!def_r || !def_s) { ++skip_count; continue; }
            out.push_back({numeric[i].name, numeric[j].name, rho_r, rho_s,
                           1.0 - std::fabs(rho_r - rho_s) / 2.0});
        }
    }
    if (skipped) *skipped = skip_count;
    return out;
}

double table_structure(const Table& real, const Table& synth) {
    std::unordered_map<std::string, ColumnKind> real_cols;
    for (const auto& c : real.schema()) real_cols.emplace(c.name, c.kind);
    std::unordered_set<std::string> all;
    for (const auto& c : real.schema()) all.insert(c.name);
    std::size_t matched = 0;
    for (const auto& c : synth.schema()) {
        all.insert(c.name);
        auto it = real_cols.find(c.name);
        if (it != real_cols.end() && it->second == c.kind) ++matched;
    }
    if (all.empty()) throw DegenerateInput("both tables have zero columns");
    return static_cast<double>(matched) / static_cast<double>(all.size());
}

double boundary_adherence(const Table& real, const Table& synth) {
    auto shared = shared_columns(real, synth);
    if (shared.empty()) throw NoSharedColumns();
    if (real.n_rows() == 0) throw EmptyColumn("boundary adherence needs real rows");
    double total = 0.0;
    for (const auto& col : shared) {
        double inside = 0.0;
        const double n_synth = static_cast<double>(synth.n_rows());
        if (n_synth == 0.0) { total += 1.0; continue; }
        if (col.kind == ColumnKind::Numeric) {
            auto rvals = real.numeric_column(col.real_col);
            double lo = rvals[0], hi = rvals[0];
            for (std::size_t r = 1; r < real.n_rows(); ++r) {
                lo = std::min(lo, rvals[r]);
                hi = std::max(hi, rvals[r]);
            }
            auto svals = synth.numeric_column(col.synth_col);
            for (std::size_t r = 0; r < synth.n_rows(); ++r)
                if (svals[r] >= lo && svals[r] <= hi) inside += 1.0;
        } else {
            std::unordered_set<std::string> seen;
            auto rcodes = real.codes(col.real_col);
            const auto& rdict = real.dictionary(col.real_col);
            for (auto c : rcodes) seen.insert(rdict[static_cast<std::size_t>(c)]);
            auto scodes = synth.codes(col.synth_col);
            const auto& sdict = synth.dictionary(col.synth_col);
            for (auto c : scodes)
                if (seen.count(sdict[static_cast<std::size_t>(c)])) inside += 1.0;
        }
        total += inside / n_synth;
    }
    return total / static_cast<double>(shared.size());
}

QualityReport quality_report(const Table& real, const Table& synth) {
    auto shared = shared_columns(real, synth);
    if (shared.empty()) throw NoSharedColumns();
    if (real.n_rows() == 0 || synth.n_rows() == 0)
        throw EmptyColumn("quality report needs rows in both tables");

    QualityReport rep;
    double shape_sum = 0.0;
    for (const auto& col : shared) {
        double score;
        std::string metric;
        if (col.kind == ColumnKind::Numeric) {
            score = ks_complement(real.numeric_column(col.real_col).to_vector(),
                                  synth.numeric_column(col.synth_col).to_vector());
            metric = "ks_complement";
        } else {
            std::vector<std::int32_t> rc, sc;
            std::size_t n_cat = 0;
            align_codes(real, col.real_col, synth, col.synth_col, rc, sc, n_cat);
            score = tv_complement(rc, sc, n_cat);
            metric = "tv_complement";
        }
        rep.shapes.push_back({col.name, metric, score});
        shape_sum += score;
    }
    rep.shapes_average = shape_sum / static_cast<double>(rep.shapes.size());

    std::size_t numeric_shared = 0;
    for (const auto& col : shared)
        if (col.kind == ColumnKind::Numeric) ++numeric_shared;

    rep.correlation_pairs_skipped = 0;
    if (numeric_shared >= 2 && real.n_rows() >= 2 && synth.n_rows() >= 2) {
        rep.correlations = correlation_similarity(real, synth, &rep.correlation_pairs_skipped);
    }
    if (rep.correlations.empty()) {
        // No scorable pair: vacuously preserved, so a perfect copy still
        // reaches an overall score of 1.
        rep.correlation_average = 1.0;
    } else {
        double s = 0.0;
        for (const auto& p : rep.correlations) s += p.score;
        rep.correlation_average = s / static_cast<double>(rep.correlations.size());
    }
    rep.overall = (rep.shapes_average + rep.correlation_average) / 2.0;
    return rep;
}

DiagnosticReport diagnostic_report(const Table& real, const Table& synth) {
    DiagnosticReport d;
    d.table_structure = table_structure(real, synth);
    d.boundary_adherence = boundary_adherence(real, synth);
    d.overall = (d.table_structure + d.boundary_adherence) / 2.0;
    return d;
}

GateDecision gate(const QualityReport& q, const DiagnosticReport& d, const GateConfig& cfg) {
    GateDecision g;
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };
    if (q.overall < cfg.quality_threshold)
        g.reasons.push_back("quality score " + fmt(q.overall) + " below threshold " +
                            fmt(cfg.quality_threshold));
    if (d.overall < cfg.diagnostic_threshold)
        g.reasons.push_back("diagnostic score " + fmt(d.overall) + " below threshold " +
                            fmt(cfg.diagnostic_threshold));
    g.pass = g.reasons.empty();
    return g;
}

}  // namespace tabeval
