#include "tabeval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "tabeval/divergence.hpp"
#include "tabeval/ingest.hpp"
#include "tabeval/rng.hpp"

namespace tabeval {

namespace {

Json config_echo(const PipelineConfig& cfg) {
    Json j{{"real", cfg.real_path},
           {"synthetic", cfg.synth_path},
           {"label_column", cfg.label_column},
           {"schema", cfg.schema_path},
           {"seed", cfg.seed},
           {"permutations", cfg.permutations},
           {"alpha", cfg.alpha},
           {"quality_gate", cfg.quality_gate},
           {"diagnostic_gate", cfg.diagnostic_gate},
           {"stability_band", cfg.stability_band},
           {"test_fraction", cfg.test_fraction}};
    if (cfg.subsample)
        j["subsample"] = *cfg.subsample;
    else
        j["subsample"] = nullptr;
    return j;
}

Json input_echo(const std::string& path, const Table& t) {
    return {{"path", path},
            {"rows", t.n_rows()},
            {"columns", t.n_cols()},
            {"digest", file_digest(path)}};
}

/// Category distribution of one categorical column over its own dictionary.
LabelDistribution column_distribution(const Table& t, std::size_t col,
                                      const std::vector<std::string>& categories) {
    LabelDistribution d;
    d.categories = categories;
    d.proportions.assign(categories.size(), 0.0);
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < categories.size(); ++i) index.emplace(categories[i], i);
    const auto& dict = t.dictionary(col);
    auto codes = t.codes(col);
    for (auto c : codes) {
        auto it = index.find(dict[static_cast<std::size_t>(c)]);
        if (it != index.end()) d.proportions[it->second] += 1.0;
    }
    for (double& p : d.proportions) p /= static_cast<double>(t.n_rows());
    return d;
}

Json divergence_section(const Table& real, const Table& synth) {
    Json cols = Json::array();
    for (std::size_t c = 0; c < real.n_cols(); ++c) {
        if (real.kind(c) != ColumnKind::Categorical) continue;
        auto sidx = synth.find_column(real.schema()[c].name);
        if (!sidx || synth.kind(*sidx) != ColumnKind::Categorical) continue;
        // Shared category axis: real dictionary order, synthetic-only appended.
        std::vector<std::string> categories = real.dictionary(c);
        for (const auto& cat : synth.dictionary(*sidx))
            if (std::find(categories.begin(), categories.end(), cat) == categories.end())
                categories.push_back(cat);
        LabelDistribution p = column_distribution(real, c, categories);
        LabelDistribution q = column_distribution(synth, *sidx, categories);
        cols.push_back({{"column", real.schema()[c].name},
                        {"jensen_shannon", jensen_shannon(p, q)},
                        {"hellinger", hellinger(p, q)},
                        {"wasserstein1", wasserstein1_categorical(p, q)}});
    }
    return {{"columns", std::move(cols)}};
}

Matrix scaled_numeric(const Table& t, const RobustScalerParams& scaler) {
    return apply_scaler(t, scaler).numeric_feature_matrix();
}

void write_text(const std::string& path, const std::string& text, bool force) {
    if (!force && std::filesystem::exists(path))
        throw Error("refusing to overwrite " + path + " (pass --force)");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace

PipelineOutcome run_full(const PipelineConfig& cfg) {
    std::optional<SchemaHint> hint;
    if (!cfg.schema_path.empty()) hint = read_schema_hint(cfg.schema_path);
    Table real = read_csv(cfg.real_path, hint);
    Table synth = read_csv(cfg.synth_path, hint);
    if (!cfg.label_column.empty()) {
        real = real.with_label(cfg.label_column);
        synth = synth.with_label(cfg.label_column);
    }

    Json report;
    report["tool"] = kToolName;
    report["version"] = kToolVersion;
    report["generated_at"] = utc_timestamp_now();
    report["config"] = config_echo(cfg);
    report["inputs"] = {{"real", input_echo(cfg.real_path, real)},
                        {"synthetic", input_echo(cfg.synth_path, synth)}};

    QualityReport q = quality_report(real, synth);
    DiagnosticReport d = diagnostic_report(real, synth);
    GateDecision g = gate(q, d, {cfg.quality_gate, cfg.diagnostic_gate});
    report["quality"] = to_json(q);
    report["diagnostic"] = to_json(d);
    bool quality_pass = q.overall >= cfg.quality_gate;
    bool diagnostic_pass = d.overall >= cfg.diagnostic_gate;
    report["gate"] = {{"pass", g.pass},
                      {"quality_pass", quality_pass},
                      {"diagnostic_pass", diagnostic_pass},
                      {"reasons", g.reasons}};

    report["divergence"] = divergence_section(real, synth);

    // Train/test split of the real table, stratified on the label if present.
    Table real_train, real_test;
    if (real.has_label()) {
        SplitSpec split;
        split.test_fraction = cfg.test_fraction;
        split.stratify_on = cfg.label_column;
        split.seed = cfg.seed;
        std::tie(real_train, real_test) = stratified_split(real, split);
    } else {
        std::vector<std::size_t> rows(real.n_rows());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, "plain_split"));
        rng.shuffle(rows);
        std::size_t n_test = static_cast<std::size_t>(
            std::llround(cfg.test_fraction * static_cast<double>(real.n_rows())));
        std::vector<std::size_t> test_rows(rows.begin(), rows.begin() + n_test);
        std::vector<std::size_t> train_rows(rows.begin() + n_test, rows.end());
        std::sort(test_rows.begin(), test_rows.end());
        std::sort(train_rows.begin(), train_rows.end());
        real_train = real.select_rows(train_rows);
        real_test = real.select_rows(test_rows);
    }

    // Multivariate two-sample tests on robust-scaled numeric features; the
    // scaler comes from the real training split.
    RobustScalerParams scaler = fit_robust_scaler(real_train);
    Matrix real_scaled = scaled_numeric(real, scaler);
    Matrix synth_scaled = scaled_numeric(synth, scaler);
    TestConfig tc;
    tc.permutations = cfg.permutations;
    tc.alpha = cfg.alpha;
    tc.subsample = cfg.subsample;
    tc.seed = cfg.seed;
    report["statistical_tests"] = {
        {"mean_shift", to_json(hotelling_t2_regularized(real_scaled, synth_scaled, tc))},
        {"covariance_shift", to_json(frobenius_covariance_test(real_scaled, synth_scaled, tc))},
        {"kernel_mmd", to_json(mmd_test(real_scaled, synth_scaled, tc))}};

    ClassifierSpec clf;
    report["distinguishability"] = to_json(distinguishability(real, synth, clf, cfg.seed));

    if (real.has_label()) {
        auto suite = utility_suite(real_train, real_test, synth, clf, cfg.seed);
        Json protocols = Json::array();
        for (const auto& r : suite) protocols.push_back(to_json(r));
        report["utility"] = {{"protocols", std::move(protocols)}};
    } else {
        report["utility"] = {{"skipped", "no label column configured"}};
    }

    report["privacy"] = to_json(privacy_report(synth, real_train, real_test, cfg.stability_band));

    std::filesystem::create_directories(cfg.output_dir);
    PipelineOutcome out;
    out.report = std::move(report);
    out.quality_pass = quality_pass;
    out.diagnostic_pass = diagnostic_pass;
    out.report_path = (std::filesystem::path(cfg.output_dir) / "report.json").string();
    out.markdown_path = (std::filesystem::path(cfg.output_dir) / "report.md").string();
    write_text(out.report_path, out.report.dump(2) + "\n", cfg.force);
    write_text(out.markdown_path, render_markdown(out.report), cfg.force);
    return out;
}

}  // namespace tabeval
