#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "support/testdata.hpp"
#include "tabeval/errors.hpp"
#include "tabeval/ingest.hpp"
#include "tabeval/pipeline.hpp"
#include "tabeval/report.hpp"

using namespace tabeval;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// The timestamp is the one intentionally unstable field.
Json without_timestamp(Json j) {
    j.erase("generated_at");
    return j;
}

struct ScratchDir {
    std::filesystem::path dir;
    explicit ScratchDir(const std::string& name) {
        dir = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove_all(dir);
        std::filesystem::create_directories(dir);
    }
    ~ScratchDir() { std::filesystem::remove_all(dir); }
    std::string path(const std::string& f) const { return (dir / f).string(); }
};

}  // namespace

TEST_CASE("file digest is the 64-bit fnv-1a of the bytes") {
    std::string p = temp_path("tabeval_digest.txt");
    {
        std::ofstream out(p, std::ios::binary);
        out << "hello\n";
    }
    CHECK(file_digest(p) == "a9bc80cca21f28b3");
    {
        std::ofstream out(p, std::ios::binary);
        out << "";
    }
    // Empty input leaves the offset basis, 0xcbf29ce484222325.
    CHECK(file_digest(p) == "cbf29ce484222325");
    std::filesystem::remove(p);
    CHECK_THROWS_AS((void)file_digest(p), EmptyFile);
}

TEST_CASE("report fragments serialize with stable keys") {
    QualityReport q{};
    q.shapes.push_back({"x", "ks_complement", 0.9});
    q.shapes_average = 0.9;
    q.correlation_pairs_skipped = 1;
    q.correlation_average = 1.0;
    q.overall = 0.95;
    Json jq = to_json(q);
    CHECK(jq["overall"] == 0.95);
    CHECK(jq["shapes"][0]["column"] == "x");
    CHECK(jq.contains("correlation_pairs_skipped"));

    PermutationResult pr{};
    pr.statistic_name = "mmd";
    pr.observed = 0.1;
    pr.permutations = 10;
    pr.p_value = 0.5;
    Json jp = to_json(pr);
    CHECK_FALSE(jp.contains("zero_bandwidth"));
    pr.zero_bandwidth = true;
    CHECK(to_json(pr)["zero_bandwidth"] == true);

    PrivacyResult priv{0.0, 0.5, true, 0.04};
    Json jpriv = to_json(priv);
    CHECK(jpriv["overfit_flag"] == true);
    CHECK(jpriv["train_nndr"] == 0.0);

    GateDecision g{false, {"quality score 0.5 below threshold 0.65"}};
    Json jg = to_json(g);
    CHECK(jg["pass"] == false);
    CHECK(jg["reasons"].size() == 1);
}

TEST_CASE("full pipeline writes deterministic reports") {
    ScratchDir scratch("tabeval_pipeline_test");
    Table real = testdata::two_class_gaussian(160, 50);
    Table synth = testdata::two_class_gaussian(160, 51);
    write_csv(real, scratch.path("real.csv"));
    write_csv(synth, scratch.path("synth.csv"));

    PipelineConfig cfg;
    cfg.real_path = scratch.path("real.csv");
    cfg.synth_path = scratch.path("synth.csv");
    cfg.label_column = "cls";
    cfg.output_dir = scratch.path("out");
    cfg.seed = 11;
    cfg.permutations = 60;

    std::filesystem::create_directories(cfg.output_dir);
    PipelineOutcome first = run_full(cfg);
    CHECK(first.quality_pass);
    CHECK(first.diagnostic_pass);
    CHECK(std::filesystem::exists(first.report_path));
    CHECK(std::filesystem::exists(first.markdown_path));

    // Required sections in order-stable JSON.
    const Json& r = first.report;
    CHECK(r["tool"] == "tabeval");
    CHECK(r["version"] == kToolVersion);
    CHECK(r.contains("generated_at"));
    CHECK(r["inputs"]["real"]["rows"] == 160);
    CHECK(r["inputs"]["real"]["digest"].get<std::string>().size() == 16);
    CHECK(r.contains("quality"));
    CHECK(r.contains("diagnostic"));
    CHECK(r["gate"].contains("pass"));
    CHECK(r["statistical_tests"].contains("mean_shift"));
    CHECK(r["statistical_tests"].contains("covariance_shift"));
    CHECK(r["statistical_tests"].contains("kernel_mmd"));
    CHECK(r.contains("distinguishability"));
    CHECK(r["utility"]["protocols"].size() == 3);
    CHECK(r.contains("privacy"));
    CHECK(r["divergence"]["columns"].size() == 2);  // seg and the label column

    // Second run with force overwrites and agrees apart from the timestamp.
    cfg.force = true;
    PipelineOutcome second = run_full(cfg);
    CHECK(without_timestamp(first.report) == without_timestamp(second.report));
    Json from_disk = Json::parse(slurp(first.report_path));
    CHECK(without_timestamp(from_disk) == without_timestamp(second.report));

    // Without force the pipeline refuses to clobber its own output.
    cfg.force = false;
    CHECK_THROWS_AS((void)run_full(cfg), Error);

    std::string md = slurp(first.markdown_path);
    CHECK(md.find("# synthetic data evaluation") != std::string::npos);
    CHECK(md.find("## quality") != std::string::npos);
    CHECK(md.find("## privacy") != std::string::npos);
    CHECK(md.find("## utility") != std::string::npos);
    CHECK(md.find("PASS") != std::string::npos);
}

TEST_CASE("pipeline without a label skips utility but keeps the rest") {
    ScratchDir scratch("tabeval_pipeline_nolabel");
    Table real = testdata::gaussian_cloud(80, 3, 52);
    Table synth = testdata::gaussian_cloud(80, 3, 53);
    write_csv(real, scratch.path("real.csv"));
    write_csv(synth, scratch.path("synth.csv"));

    PipelineConfig cfg;
    cfg.real_path = scratch.path("real.csv");
    cfg.synth_path = scratch.path("synth.csv");
    cfg.output_dir = scratch.path("out");
    cfg.seed = 3;
    cfg.permutations = 40;
    std::filesystem::create_directories(cfg.output_dir);

    PipelineOutcome out = run_full(cfg);
    CHECK(out.report["utility"].contains("skipped"));
    CHECK(out.report.contains("distinguishability"));
    CHECK(out.report.contains("privacy"));
    CHECK(out.report["divergence"]["columns"].empty());
}

TEST_CASE("gate failures appear in report and markdown") {
    ScratchDir scratch("tabeval_pipeline_fail");
    Table real = testdata::gaussian_cloud(80, 2, 54, 0.0, 1.0);
    Table synth = testdata::gaussian_cloud(80, 2, 55, 8.0, 1.0);  // far off
    write_csv(real, scratch.path("real.csv"));
    write_csv(synth, scratch.path("synth.csv"));

    PipelineConfig cfg;
    cfg.real_path = scratch.path("real.csv");
    cfg.synth_path = scratch.path("synth.csv");
    cfg.output_dir = scratch.path("out");
    cfg.seed = 4;
    cfg.permutations = 40;
    std::filesystem::create_directories(cfg.output_dir);

    PipelineOutcome out = run_full(cfg);
    CHECK_FALSE(out.diagnostic_pass);
    CHECK(out.report["gate"]["pass"] == false);
    CHECK(out.report["gate"]["reasons"].size() >= 1);
    CHECK(out.report["statistical_tests"]["mean_shift"]["reject"] == true);

    std::string md = slurp(out.markdown_path);
    CHECK(md.find("gate failures:") != std::string::npos);
    CHECK(md.find("FAIL") != std::string::npos);
}

TEST_CASE("markdown renderer survives a minimal report") {
    Json j;
    j["tool"] = "tabeval";
    std::string md = render_markdown(j);
    CHECK(md.find("# synthetic data evaluation") != std::string::npos);
}
