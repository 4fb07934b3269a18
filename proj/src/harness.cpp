#include "tabeval/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "tabeval/ingest.hpp"
#include "tabeval/rng.hpp"

namespace tabeval {

namespace {

Table drop_label(const Table& t) {
    if (!t.has_label()) return t;
    return t.drop_column(t.schema()[t.label_index()].name);
}

std::vector<ColumnSchema> shared_feature_columns(const Table& a, const Table& b) {
    std::vector<ColumnSchema> shared;
    for (const auto& col : a.schema()) {
        auto idx = b.find_column(col.name);
        if (idx && b.kind(*idx) == col.kind) shared.push_back(col);
    }
    return shared;
}

Table keep_columns(const Table& t, const std::vector<ColumnSchema>& cols) {
    Table out = t;
    for (const auto& col : t.schema()) {
        bool keep = std::any_of(cols.begin(), cols.end(),
                                [&](const ColumnSchema& c) { return c.name == col.name; });
        if (!keep) out = out.drop_column(col.name);
    }
    return out;
}

Table subsample_rows(const Table& t, std::size_t n, std::uint64_t seed) {
    if (n >= t.n_rows()) return t;
    std::vector<std::size_t> rows(t.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(rows);
    rows.resize(n);
    std::sort(rows.begin(), rows.end());
    return t.select_rows(rows);
}

Table append_source_label(const Table& t, std::size_t n_real) {
    if (t.find_column("__source"))
        throw SchemaMismatch("column '__source' already exists");
    TableBuilder b;
    for (std::size_t c = 0; c < t.n_cols(); ++c) {
        const auto& col = t.schema()[c];
        if (col.kind == ColumnKind::Numeric) {
            b.add_numeric(col.name, t.numeric_column(c).to_vector());
        } else {
            auto codes = t.codes(c);
            b.add_categorical_coded(col.name, {codes.begin(), codes.end()}, t.dictionary(c));
        }
    }
    std::vector<std::int32_t> source(t.n_rows());
    for (std::size_t i = n_real; i < t.n_rows(); ++i) source[i] = 1;
    b.add_categorical_coded("__source", std::move(source), {"real", "synthetic"},
                            ColumnRole::Label);
    return b.build();
}

MacroScores macro_scores(const MetricsBundle& m) {
    return {m.macro_precision, m.macro_recall, m.macro_f1, m.macro_roc_auc};
}

}  // namespace

const char* utility_protocol_name(UtilityProtocol p) {
    switch (p) {
        case UtilityProtocol::TrainRealTestReal: return "train_real_test_real";
        case UtilityProtocol::TrainRealTestSynth: return "train_real_test_synth";
        case UtilityProtocol::TrainSynthTestReal: return "train_synth_test_real";
    }
    return "train_real_test_real";
}

DistinguishabilityResult distinguishability(const Table& real, const Table& synth,
                                            const ClassifierSpec& spec, std::uint64_t seed) {
    Table r = drop_label(real);
    Table s = drop_label(synth);
    auto shared = shared_feature_columns(r, s);
    if (shared.empty()) throw NoSharedColumns();
    r = keep_columns(r, shared);
    s = keep_columns(s, shared);

    std::size_t n = std::min(r.n_rows(), s.n_rows());
    if (n < 5) throw DegenerateInput("too few rows to split for distinguishability");
    r = subsample_rows(r, n, derive_seed(seed, "distinguish_real"));
    s = subsample_rows(s, n, derive_seed(seed, "distinguish_synth"));

    Table combined = append_source_label(vertical_concat(r, s), n);
    SplitSpec split;
    split.test_fraction = 0.2;
    split.stratify_on = "__source";
    split.seed = derive_seed(seed, "distinguish_split");
    auto [train, test] = stratified_split(combined, split);

    auto model = train_classifier(spec, train, derive_seed(seed, "distinguish_model"));
    MetricsBundle m = evaluate(*model, test);

    DistinguishabilityResult out;
    out.classifier = model->name();
    out.n_real = n;
    out.n_synth = n;
    out.seed = seed;
    out.f1_synthetic = 0.0;
    out.roc_auc = m.macro_roc_auc;
    for (const auto& pc : m.per_class) {
        if (pc.cls != "synthetic") continue;
        out.f1_synthetic = pc.f1;
        if (pc.roc_auc) out.roc_auc = *pc.roc_auc;
    }
    return out;
}

std::array<UtilityResult, 3> utility_suite(const Table& real_train, const Table& real_test,
                                           const Table& synth, const ClassifierSpec& spec,
                                           std::uint64_t seed) {
    auto model_real = train_classifier(spec, real_train, derive_seed(seed, "utility_real"));
    auto model_synth = train_classifier(spec, synth, derive_seed(seed, "utility_synth"));

    auto run = [](const Classifier& model, const Table& train_table, const Table& eval_table,
                  UtilityProtocol protocol) {
        MetricsBundle on_train = evaluate(model, train_table);
        MetricsBundle on_eval = evaluate(model, eval_table);
        UtilityResult r;
        r.protocol = protocol;
        r.classifier = model.name();
        r.train = macro_scores(on_train);
        r.test = macro_scores(on_eval);
        r.missing_classes = on_eval.absent_classes;
        r.missing_classes.insert(r.missing_classes.end(), on_eval.unknown_classes.begin(),
                                 on_eval.unknown_classes.end());
        std::sort(r.missing_classes.begin(), r.missing_classes.end());
        r.missing_classes.erase(
            std::unique(r.missing_classes.begin(), r.missing_classes.end()),
            r.missing_classes.end());
        return r;
    };

    return {run(*model_real, real_train, real_test, UtilityProtocol::TrainRealTestReal),
            run(*model_real, real_train, synth, UtilityProtocol::TrainRealTestSynth),
            run(*model_synth, synth, real_test, UtilityProtocol::TrainSynthTestReal)};
}

namespace {

struct NndrColumn {
    std::size_t synth_col;
    std::size_t ref_col;
    bool numeric;
    // numeric scaling (from the scaling table)
    double median = 0.0;
    double iqr = 1.0;
    bool constant = false;
    // categorical: synth code -> scaling-table dictionary code, -1 if unseen
    std::vector<std::int32_t> synth_remap;
    std::vector<std::int32_t> ref_remap;
};

std::vector<std::int32_t> dict_remap(const std::vector<std::string>& from,
                                     const std::vector<std::string>& to) {
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t i = 0; i < to.size(); ++i)
        index.emplace(to[i], static_cast<std::int32_t>(i));
    std::vector<std::int32_t> remap(from.size(), -1);
    for (std::size_t i = 0; i < from.size(); ++i) {
        auto it = index.find(from[i]);
        if (it != index.end()) remap[i] = it->second;
    }
    return remap;
}

double nndr_impl(const Table& synth, const Table& reference, const Table& scale_on,
                 bool exclude_self_pairs) {
    std::size_t needed = exclude_self_pairs ? 3 : 2;
    if (reference.n_rows() < needed) throw TooFewReferenceRows();
    if (synth.n_rows() == 0) throw DegenerateInput("no synthetic rows to score");

    std::vector<NndrColumn> cols;
    for (const auto& col : synth.schema()) {
        auto ref_idx = reference.find_column(col.name);
        auto scale_idx = scale_on.find_column(col.name);
        if (!ref_idx || !scale_idx) continue;
        if (reference.kind(*ref_idx) != col.kind || scale_on.kind(*scale_idx) != col.kind)
            continue;
        NndrColumn nc;
        nc.synth_col = synth.column_index(col.name);
        nc.ref_col = *ref_idx;
        nc.numeric = col.kind == ColumnKind::Numeric;
        if (nc.numeric) {
            auto view = scale_on.numeric_column(*scale_idx);
            std::vector<double> sorted = view.to_vector();
            if (sorted.empty()) throw EmptyColumn(col.name);
            std::sort(sorted.begin(), sorted.end());
            nc.median = quantile_type7(sorted, 0.5);
            nc.iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
            nc.constant = nc.iqr == 0.0;
        } else {
            const auto& target = scale_on.dictionary(*scale_idx);
            nc.synth_remap = dict_remap(synth.dictionary(nc.synth_col), target);
            nc.ref_remap = dict_remap(reference.dictionary(*ref_idx), target);
        }
        cols.push_back(std::move(nc));
    }
    if (cols.empty()) throw NoSharedColumns();

    // Pre-scale both sides into dense buffers; categoricals as remapped codes.
    auto encode = [&](const Table& t, bool is_synth) {
        std::vector<std::vector<double>> out(cols.size());
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& nc = cols[c];
            std::size_t idx = is_synth ? nc.synth_col : nc.ref_col;
            out[c].resize(t.n_rows());
            if (nc.numeric) {
                auto view = t.numeric_column(idx);
                for (std::size_t i = 0; i < t.n_rows(); ++i)
                    out[c][i] = nc.constant ? view[i] - nc.median
                                            : (view[i] - nc.median) / nc.iqr;
            } else {
                auto codes = t.codes(idx);
                const auto& remap = is_synth ? nc.synth_remap : nc.ref_remap;
                for (std::size_t i = 0; i < t.n_rows(); ++i)
                    out[c][i] = static_cast<double>(remap[static_cast<std::size_t>(codes[i])]);
            }
        }
        return out;
    };
    auto s_enc = encode(synth, true);
    auto r_enc = encode(reference, false);

    double total = 0.0;
    for (std::size_t i = 0; i < synth.n_rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        double second = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reference.n_rows(); ++j) {
            if (exclude_self_pairs && j == i) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (cols[c].numeric) {
                    double diff = s_enc[c][i] - r_enc[c][j];
                    d2 += diff * diff;
                } else {
                    double a = s_enc[c][i];
                    double b = r_enc[c][j];
                    // Codes unseen in the scaling table count as distinct.
                    if (a != b || a < 0.0) d2 += 1.0;
                }
            }
            if (d2 < best) {
                second = best;
                best = d2;
            } else if (d2 < second) {
                second = d2;
            }
        }
        total += second == 0.0 ? 0.0 : std::sqrt(best) / std::sqrt(second);
    }
    return total / static_cast<double>(synth.n_rows());
}

}  // namespace

double nndr(const Table& synth, const Table& reference, bool exclude_self_pairs) {
    return nndr_impl(synth, reference, reference, exclude_self_pairs);
}

PrivacyResult privacy_report(const Table& synth, const Table& real_train, const Table& real_test,
                             double band) {
    PrivacyResult r;
    r.band = band;
    r.train_nndr = nndr_impl(synth, real_train, real_train, false);
    r.test_nndr = nndr_impl(synth, real_test, real_train, false);
    r.overfit_flag = std::fabs(r.train_nndr - r.test_nndr) > band;
    return r;
}

}  // namespace tabeval
