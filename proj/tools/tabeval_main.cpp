#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tabeval/divergence.hpp"
#include "tabeval/generators.hpp"
#include "tabeval/harness.hpp"
#include "tabeval/ingest.hpp"
#include "tabeval/pipeline.hpp"
#include "tabeval/quality.hpp"
#include "tabeval/report.hpp"
#include "tabeval/rng.hpp"
#include "tabeval/stattests.hpp"

namespace {

using tabeval::Json;
using tabeval::Table;

Table load_table(const std::string& path, const std::string& schema_path,
                 const std::string& label) {
    std::optional<tabeval::SchemaHint> hint;
    if (!schema_path.empty()) hint = tabeval::read_schema_hint(schema_path);
    Table t = tabeval::read_csv(path, hint);
    if (!label.empty()) t = t.with_label(label);
    return t;
}

std::pair<Table, Table> split_real(const Table& real, double test_fraction, std::uint64_t seed) {
    if (real.has_label()) {
        tabeval::SplitSpec spec;
        spec.test_fraction = test_fraction;
        spec.stratify_on = real.schema()[real.label_index()].name;
        spec.seed = seed;
        return tabeval::stratified_split(real, spec);
    }
    std::vector<std::size_t> rows(real.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    tabeval::Rng rng(tabeval::derive_seed(seed, "plain_split"));
    rng.shuffle(rows);
    auto n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(real.n_rows())));
    std::vector<std::size_t> test_rows(rows.begin(), rows.begin() + n_test);
    std::vector<std::size_t> train_rows(rows.begin() + n_test, rows.end());
    std::sort(test_rows.begin(), test_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    return {real.select_rows(train_rows), real.select_rows(test_rows)};
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evaluate synthetic tabular data against the real thing"};
    app.set_version_flag("--version", std::string(tabeval::kToolVersion));
    app.require_subcommand(1);

    // Options shared by several subcommands; each subcommand binds the ones
    // it accepts, so unknown flags still fail parsing.
    std::string real_path, synth_path, label, schema_path, output_dir = ".";
    std::uint64_t seed = 7;
    std::size_t permutations = 500;
    double alpha = 0.05;
    double quality_gate = 0.65;
    double diagnostic_gate = 0.95;
    double stability_band = 0.04;
    double test_fraction = 0.2;
    std::size_t subsample_value = 0;
    bool force = false;

    auto add_real = [&](CLI::App* cmd, bool required = true) {
        auto* o = cmd->add_option("--real", real_path, "real data CSV");
        if (required) o->required();
    };
    auto add_synth = [&](CLI::App* cmd) {
        cmd->add_option("--synth", synth_path, "synthetic data CSV")->required();
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--label", label, "label column name");
        cmd->add_option("--schema", schema_path, "column kind/role hints CSV");
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed")->capture_default_str();
    };

    auto* cmd_full = app.add_subcommand("full", "run the whole evaluation battery");
    add_real(cmd_full);
    add_synth(cmd_full);
    add_common(cmd_full);
    add_seed(cmd_full);
    cmd_full->add_option("--output-dir", output_dir, "where report.json and report.md go")->capture_default_str();
    cmd_full->add_option("--permutations", permutations, "permutation count")->capture_default_str();
    cmd_full->add_option("--alpha", alpha, "rejection level")->capture_default_str();
    cmd_full->add_option("--quality-gate", quality_gate, "quality threshold")->capture_default_str();
    cmd_full->add_option("--diagnostic-gate", diagnostic_gate, "diagnostic threshold")->capture_default_str();
    cmd_full->add_option("--stability-band", stability_band, "privacy band")->capture_default_str();
    cmd_full->add_option("--test-fraction", test_fraction, "held-out fraction of real")->capture_default_str();
    auto* full_subsample = cmd_full->add_option("--subsample", subsample_value,
                                                "row cap per group for the kernel test");
    cmd_full->add_flag("--force", force, "overwrite existing report files");

    auto* cmd_quality = app.add_subcommand("quality", "column shapes and correlations");
    add_real(cmd_quality);
    add_synth(cmd_quality);
    add_common(cmd_quality);
    cmd_quality->add_option("--quality-gate", quality_gate, "quality threshold")->capture_default_str();

    auto* cmd_diagnose = app.add_subcommand("diagnose", "structure and boundary checks");
    add_real(cmd_diagnose);
    add_synth(cmd_diagnose);
    add_common(cmd_diagnose);
    cmd_diagnose->add_option("--diagnostic-gate", diagnostic_gate, "diagnostic threshold")->capture_default_str();

    auto* cmd_distinguish = app.add_subcommand("distinguish", "real-vs-synthetic classifier");
    add_real(cmd_distinguish);
    add_synth(cmd_distinguish);
    add_common(cmd_distinguish);
    add_seed(cmd_distinguish);

    auto* cmd_utility = app.add_subcommand("utility", "train/test protocol comparison");
    add_real(cmd_utility);
    add_synth(cmd_utility);
    cmd_utility->add_option("--label", label, "label column name")->required();
    cmd_utility->add_option("--schema", schema_path, "column kind/role hints CSV");
    add_seed(cmd_utility);
    cmd_utility->add_option("--test-fraction", test_fraction, "held-out fraction of real")->capture_default_str();

    auto* cmd_divergence = app.add_subcommand("divergence", "categorical column divergences");
    add_real(cmd_divergence);
    add_synth(cmd_divergence);
    add_common(cmd_divergence);

    auto* cmd_stattest = app.add_subcommand("stattest", "permutation two-sample tests");
    add_real(cmd_stattest);
    add_synth(cmd_stattest);
    add_common(cmd_stattest);
    add_seed(cmd_stattest);
    cmd_stattest->add_option("--permutations", permutations, "permutation count")->capture_default_str();
    cmd_stattest->add_option("--alpha", alpha, "rejection level")->capture_default_str();
    auto* st_subsample = cmd_stattest->add_option("--subsample", subsample_value,
                                                  "row cap per group for the kernel test");

    auto* cmd_privacy = app.add_subcommand("privacy", "nearest-neighbor distance ratios");
    add_real(cmd_privacy);
    add_synth(cmd_privacy);
    add_common(cmd_privacy);
    add_seed(cmd_privacy);
    cmd_privacy->add_option("--test-fraction", test_fraction, "held-out fraction of real")->capture_default_str();
    cmd_privacy->add_option("--stability-band", stability_band, "overfit band")->capture_default_str();

    // Generator commands.
    std::string model_path, out_path, trace_path, model_type = "gmm";
    std::size_t gmm_k = 1;
    double gmm_ridge = 1e-6;
    std::size_t sample_n = 0;
    tabeval::GanSpec gan;
    std::string proportions_name = "match";
    const std::map<std::string, tabeval::GanObjective> objective_names{
        {"vanilla", tabeval::GanObjective::Vanilla},
        {"conditional", tabeval::GanObjective::Conditional},
        {"wasserstein", tabeval::GanObjective::Wasserstein},
        {"wasserstein-gp", tabeval::GanObjective::WassersteinGP},
        {"fgan-kl", tabeval::GanObjective::FGanKL},
        {"fgan-h2", tabeval::GanObjective::FGanSquaredHellinger}};

    auto* cmd_fitgen = app.add_subcommand("fitgen", "fit a generator on real data");
    add_real(cmd_fitgen);
    add_common(cmd_fitgen);
    add_seed(cmd_fitgen);
    cmd_fitgen->add_option("--model", model_path, "output model file")->required();
    cmd_fitgen->add_option("--type", model_type, "gmm or gan")->capture_default_str()
        ->check(CLI::IsMember({"gmm", "gan"}));
    cmd_fitgen->add_option("--k", gmm_k, "mixture components per class")->capture_default_str();
    cmd_fitgen->add_option("--ridge", gmm_ridge, "covariance ridge scale")->capture_default_str();
    cmd_fitgen->add_option("--objective", gan.objective, "adversarial objective")
        ->transform(CLI::CheckedTransformer(objective_names, CLI::ignore_case));
    cmd_fitgen->add_option("--noise-dim", gan.noise_dim, "generator noise width")->capture_default_str();
    cmd_fitgen->add_option("--gen-hidden", gan.gen_hidden, "generator hidden widths")
        ->delimiter(',');
    cmd_fitgen->add_option("--disc-hidden", gan.disc_hidden, "discriminator hidden widths")
        ->delimiter(',');
    cmd_fitgen->add_option("--leaky-slope", gan.leaky_slope, "LeakyReLU slope")->capture_default_str();
    cmd_fitgen->add_option("--epochs", gan.epochs, "training epochs")->capture_default_str();
    cmd_fitgen->add_option("--batch-size", gan.batch_size, "batch size")->capture_default_str();
    cmd_fitgen->add_option("--step-size", gan.step_size, "SGD step size")->capture_default_str();
    cmd_fitgen->add_option("--critic-steps", gan.critic_steps, "discriminator steps per batch")
        ->capture_default_str();
    cmd_fitgen->add_option("--clip", gan.clip, "weight clip (wasserstein)")->capture_default_str();
    cmd_fitgen->add_option("--gp-weight", gan.gp_weight, "gradient penalty weight")->capture_default_str();
    cmd_fitgen->add_flag("--saturating", gan.saturating_generator,
                         "use the saturating generator loss");
    cmd_fitgen->add_option("--trace", trace_path, "write per-step losses to this CSV");

    auto* cmd_sample = app.add_subcommand("sample", "draw rows from a fitted generator");
    cmd_sample->add_option("--model", model_path, "model file from fitgen")->required();
    cmd_sample->add_option("--n", sample_n, "rows to draw")->required();
    cmd_sample->add_option("--out", out_path, "output CSV")->required();
    cmd_sample->add_option("--proportions", proportions_name, "match or uniform")->capture_default_str()
        ->check(CLI::IsMember({"match", "uniform"}));
    add_seed(cmd_sample);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 64;
    }

    try {
        if (app.got_subcommand(cmd_full)) {
            tabeval::PipelineConfig cfg;
            cfg.real_path = real_path;
            cfg.synth_path = synth_path;
            cfg.label_column = label;
            cfg.schema_path = schema_path;
            cfg.output_dir = output_dir;
            cfg.seed = seed;
            cfg.permutations = permutations;
            cfg.alpha = alpha;
            cfg.quality_gate = quality_gate;
            cfg.diagnostic_gate = diagnostic_gate;
            cfg.stability_band = stability_band;
            cfg.test_fraction = test_fraction;
            cfg.force = force;
            if (full_subsample->count()) cfg.subsample = subsample_value;
            tabeval::PipelineOutcome outcome = tabeval::run_full(cfg);
            std::cout << tabeval::render_markdown(outcome.report);
            std::cout << "\nreport: " << outcome.report_path << "\n";
            return outcome.quality_pass && outcome.diagnostic_pass ? 0 : 2;
        }
        if (app.got_subcommand(cmd_quality)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            tabeval::QualityReport q = tabeval::quality_report(real, synth);
            Json j = tabeval::to_json(q);
            j["gate"] = quality_gate;
            j["pass"] = q.overall >= quality_gate;
            print_json(j);
            return q.overall >= quality_gate ? 0 : 2;
        }
        if (app.got_subcommand(cmd_diagnose)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            tabeval::DiagnosticReport d = tabeval::diagnostic_report(real, synth);
            Json j = tabeval::to_json(d);
            j["gate"] = diagnostic_gate;
            j["pass"] = d.overall >= diagnostic_gate;
            print_json(j);
            return d.overall >= diagnostic_gate ? 0 : 2;
        }
        if (app.got_subcommand(cmd_distinguish)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            tabeval::ClassifierSpec spec;
            print_json(tabeval::to_json(tabeval::distinguishability(real, synth, spec, seed)));
            return 0;
        }
        if (app.got_subcommand(cmd_utility)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            auto [train, test] = split_real(real, test_fraction, seed);
            tabeval::ClassifierSpec spec;
            auto suite = tabeval::utility_suite(train, test, synth, spec, seed);
            Json protocols = Json::array();
            for (const auto& r : suite) protocols.push_back(tabeval::to_json(r));
            print_json(Json{{"protocols", std::move(protocols)}});
            return 0;
        }
        if (app.got_subcommand(cmd_divergence)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            Json cols = Json::array();
            for (std::size_t c = 0; c < real.n_cols(); ++c) {
                if (real.kind(c) != tabeval::ColumnKind::Categorical) continue;
                const std::string& name = real.schema()[c].name;
                auto sidx = synth.find_column(name);
                if (!sidx || synth.kind(*sidx) != tabeval::ColumnKind::Categorical) continue;
                Table r1 = real.with_label(name);
                Table s1 = synth.with_label(name);
                tabeval::LabelDistribution p = tabeval::label_distribution(r1);
                tabeval::LabelDistribution q = tabeval::label_distribution(s1);
                // Align on the union axis: real order, synthetic-only appended.
                std::vector<std::string> axis = p.categories;
                for (const auto& cat : q.categories)
                    if (std::find(axis.begin(), axis.end(), cat) == axis.end())
                        axis.push_back(cat);
                auto expand = [&](const tabeval::LabelDistribution& d) {
                    tabeval::LabelDistribution out;
                    out.categories = axis;
                    out.proportions.assign(axis.size(), 0.0);
                    for (std::size_t i = 0; i < d.categories.size(); ++i) {
                        auto it = std::find(axis.begin(), axis.end(), d.categories[i]);
                        out.proportions[static_cast<std::size_t>(it - axis.begin())] =
                            d.proportions[i];
                    }
                    return out;
                };
                tabeval::LabelDistribution pe = expand(p), qe = expand(q);
                cols.push_back({{"column", name},
                                {"jensen_shannon", tabeval::jensen_shannon(pe, qe)},
                                {"hellinger", tabeval::hellinger(pe, qe)},
                                {"wasserstein1", tabeval::wasserstein1_categorical(pe, qe)}});
            }
            print_json(Json{{"columns", std::move(cols)}});
            return 0;
        }
        if (app.got_subcommand(cmd_stattest)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            tabeval::RobustScalerParams scaler = tabeval::fit_robust_scaler(real);
            tabeval::Matrix x = tabeval::apply_scaler(real, scaler).numeric_feature_matrix();
            tabeval::Matrix y = tabeval::apply_scaler(synth, scaler).numeric_feature_matrix();
            tabeval::TestConfig tc;
            tc.permutations = permutations;
            tc.alpha = alpha;
            tc.seed = seed;
            if (st_subsample->count()) tc.subsample = subsample_value;
            print_json(Json{
                {"mean_shift", tabeval::to_json(tabeval::hotelling_t2_regularized(x, y, tc))},
                {"covariance_shift",
                 tabeval::to_json(tabeval::frobenius_covariance_test(x, y, tc))},
                {"kernel_mmd", tabeval::to_json(tabeval::mmd_test(x, y, tc))}});
            return 0;
        }
        if (app.got_subcommand(cmd_privacy)) {
            Table real = load_table(real_path, schema_path, label);
            Table synth = load_table(synth_path, schema_path, label);
            auto [train, test] = split_real(real, test_fraction, seed);
            print_json(
                tabeval::to_json(tabeval::privacy_report(synth, train, test, stability_band)));
            return 0;
        }
        if (app.got_subcommand(cmd_fitgen)) {
            Table real = load_table(real_path, schema_path, label);
            if (model_type == "gmm") {
                tabeval::GmmSampler model = tabeval::fit_gmm(real, gmm_k, gmm_ridge, seed);
                tabeval::save_gmm(model, model_path);
                std::cout << "gmm model written to " << model_path << "\n";
            } else {
                gan.seed = seed;
                auto [model, trace] = tabeval::train_gan(real, gan);
                tabeval::save_gan(model, model_path);
                if (!trace_path.empty()) tabeval::write_trace_csv(trace, trace_path);
                std::cout << "gan model written to " << model_path << " after "
                          << trace.steps.size() << " steps\n";
            }
            return 0;
        }
        if (app.got_subcommand(cmd_sample)) {
            tabeval::Proportions prop = proportions_name == "uniform"
                                            ? tabeval::Proportions::Uniform
                                            : tabeval::Proportions::MatchReal;
            Table out;
            if (tabeval::peek_model_type(model_path) == tabeval::ModelType::Gmm) {
                out = tabeval::sample_gmm(tabeval::load_gmm(model_path), sample_n, prop, seed);
            } else {
                out = tabeval::sample_gan(tabeval::load_gan(model_path), sample_n, prop, seed);
            }
            tabeval::write_csv(out, out_path);
            std::cout << out.n_rows() << " rows written to " << out_path << "\n";
            return 0;
        }
    } catch (const tabeval::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
