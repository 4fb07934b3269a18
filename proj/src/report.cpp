#include "tabeval/report.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <vector>

namespace tabeval {

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmptyFile(path);
    std::uint64_t h = 14695981039346656037ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

std::string utc_timestamp_now() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json to_json(const QualityReport& r) {
    Json shapes = Json::array();
    for (const auto& s : r.shapes)
        shapes.push_back({{"column", s.column}, {"metric", s.metric}, {"score", s.score}});
    Json correlations = Json::array();
    for (const auto& c : r.correlations)
        correlations.push_back({{"column_a", c.column_a},
                                {"column_b", c.column_b},
                                {"real_correlation", c.real_correlation},
                                {"synthetic_correlation", c.synthetic_correlation},
                                {"score", c.score}});
    return {{"shapes", std::move(shapes)},
            {"shapes_average", r.shapes_average},
            {"correlations", std::move(correlations)},
            {"correlation_pairs_skipped", r.correlation_pairs_skipped},
            {"correlation_average", r.correlation_average},
            {"overall", r.overall}};
}

Json to_json(const DiagnosticReport& r) {
    return {{"table_structure", r.table_structure},
            {"boundary_adherence", r.boundary_adherence},
            {"overall", r.overall}};
}

Json to_json(const GateDecision& d) {
    return {{"pass", d.pass}, {"reasons", d.reasons}};
}

Json to_json(const PermutationResult& r) {
    Json j{{"statistic", r.statistic_name},
           {"observed", r.observed},
           {"permutations", r.permutations},
           {"p_value", r.p_value},
           {"reject", r.reject},
           {"null_mean", r.null_mean},
           {"null_sd", r.null_sd},
           {"seed", r.seed}};
    if (r.zero_bandwidth) j["zero_bandwidth"] = true;
    return j;
}

Json to_json(const DistinguishabilityResult& r) {
    return {{"classifier", r.classifier},
            {"f1_synthetic", r.f1_synthetic},
            {"roc_auc", r.roc_auc},
            {"n_real", r.n_real},
            {"n_synth", r.n_synth},
            {"seed", r.seed}};
}

Json to_json(const MacroScores& s) {
    return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
            {"roc_auc", s.roc_auc}};
}

Json to_json(const UtilityResult& r) {
    return {{"protocol", utility_protocol_name(r.protocol)},
            {"classifier", r.classifier},
            {"train", to_json(r.train)},
            {"test", to_json(r.test)},
            {"missing_classes", r.missing_classes}};
}

Json to_json(const PrivacyResult& r) {
    return {{"train_nndr", r.train_nndr},
            {"test_nndr", r.test_nndr},
            {"overfit_flag", r.overfit_flag},
            {"band", r.band}};
}

namespace {

std::string num(const Json& v) {
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v.get<double>());
    return buf;
}

const char* pass_word(bool b) { return b ? "PASS" : "FAIL"; }

}  // namespace

std::string render_markdown(const Json& report) {
    std::string md;
    md += "# synthetic data evaluation\n\n";
    if (report.contains("generated_at"))
        md += "generated " + report["generated_at"].get<std::string>() + " by " +
              report.value("tool", "tabeval") + " " + report.value("version", "") + "\n\n";

    if (report.contains("inputs")) {
        md += "## inputs\n\n";
        md += "| table | path | rows | columns | digest |\n";
        md += "|---|---|---|---|---|\n";
        for (const char* key : {"real", "synthetic"}) {
            if (!report["inputs"].contains(key)) continue;
            const Json& t = report["inputs"][key];
            md += std::string("| ") + key + " | " + t["path"].get<std::string>() + " | " +
                  num(t["rows"]) + " | " + num(t["columns"]) + " | " +
                  t["digest"].get<std::string>() + " |\n";
        }
        md += "\n";
    }

    if (report.contains("quality")) {
        const Json& q = report["quality"];
        md += "## quality\n\n";
        md += "overall **" + num(q["overall"]) + "** (column shapes " + num(q["shapes_average"]) +
              ", correlations " + num(q["correlation_average"]) + ") - gate " +
              pass_word(report["gate"]["quality_pass"].get<bool>()) + "\n\n";
        md += "| column | metric | score |\n|---|---|---|\n";
        for (const auto& s : q["shapes"])
            md += "| " + s["column"].get<std::string>() + " | " +
                  s["metric"].get<std::string>() + " | " + num(s["score"]) + " |\n";
        md += "\n";
    }

    if (report.contains("diagnostic")) {
        const Json& d = report["diagnostic"];
        md += "## diagnostics\n\n";
        md += "overall **" + num(d["overall"]) + "** (structure " + num(d["table_structure"]) +
              ", boundaries " + num(d["boundary_adherence"]) + ") - gate " +
              pass_word(report["gate"]["diagnostic_pass"].get<bool>()) + "\n\n";
    }

    if (report.contains("gate") && !report["gate"]["reasons"].empty()) {
        md += "gate failures:\n\n";
        for (const auto& r : report["gate"]["reasons"])
            md += "- " + r.get<std::string>() + "\n";
        md += "\n";
    }

    if (report.contains("divergence") && !report["divergence"]["columns"].empty()) {
        md += "## categorical divergences\n\n";
        md += "| column | jensen-shannon | hellinger | wasserstein-1 |\n|---|---|---|---|\n";
        for (const auto& c : report["divergence"]["columns"])
            md += "| " + c["column"].get<std::string>() + " | " + num(c["jensen_shannon"]) +
                  " | " + num(c["hellinger"]) + " | " + num(c["wasserstein1"]) + " |\n";
        md += "\n";
    }

    if (report.contains("statistical_tests")) {
        md += "## two-sample tests\n\n";
        md += "| statistic | observed | p-value | reject |\n|---|---|---|---|\n";
        for (const auto& [key, t] : report["statistical_tests"].items()) {
            (void)key;
            md += "| " + t["statistic"].get<std::string>() + " | " + num(t["observed"]) + " | " +
                  num(t["p_value"]) + " | " + (t["reject"].get<bool>() ? "yes" : "no") + " |\n";
        }
        md += "\n";
    }

    if (report.contains("distinguishability")) {
        const Json& d = report["distinguishability"];
        md += "## distinguishability\n\n";
        md += d["classifier"].get<std::string>() + " separates real from synthetic with F1 " +
              num(d["f1_synthetic"]) + " and AUC " + num(d["roc_auc"]) +
              " (0.5 is indistinguishable)\n\n";
    }

    if (report.contains("utility")) {
        const Json& u = report["utility"];
        md += "## utility\n\n";
        if (u.contains("skipped")) {
            md += "skipped: " + u["skipped"].get<std::string>() + "\n\n";
        } else {
            md += "| protocol | train F1 | test F1 | test precision | test recall |\n";
            md += "|---|---|---|---|---|\n";
            for (const auto& p : u["protocols"])
                md += "| " + p["protocol"].get<std::string>() + " | " + num(p["train"]["f1"]) +
                      " | " + num(p["test"]["f1"]) + " | " + num(p["test"]["precision"]) + " | " +
                      num(p["test"]["recall"]) + " |\n";
            md += "\n";
        }
    }

    if (report.contains("privacy")) {
        const Json& p = report["privacy"];
        md += "## privacy\n\n";
        md += "nearest-neighbor distance ratio: train " + num(p["train_nndr"]) + ", held-out " +
              num(p["test_nndr"]) + (p["overfit_flag"].get<bool>()
                                         ? " - FLAG: gap exceeds band "
                                         : " - within band ") +
              num(p["band"]) + "\n";
    }
    return md;
}

}  // namespace tabeval
