#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "support/testdata.hpp"
#include "tabeval/errors.hpp"
#include "tabeval/harness.hpp"
#include "tabeval/ingest.hpp"
#include "tabeval/rng.hpp"

using namespace tabeval;

namespace {

Table random_mixed(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> a(n), b(n);
    std::vector<std::string> c(n);
    const char* cats[] = {"u", "v", "w"};
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal() * 3.0 + 1.0;
        b[i] = rng.normal();
        c[i] = cats[rng.below(3)];
    }
    TableBuilder builder;
    builder.add_numeric("a", std::move(a));
    builder.add_numeric("b", std::move(b));
    builder.add_categorical("c", c);
    return builder.build();
}

}  // namespace

TEST_CASE("nndr equals the exhaustive oracle on random mixed tables") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Table synth = random_mixed(17, 100 + seed);
        Table reference = random_mixed(23, 200 + seed);
        double got = nndr(synth, reference);
        double want = oracle::nndr_bruteforce(synth, reference);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("nndr of an exact copy is zero") {
    Table t = random_mixed(20, 7);
    CHECK(nndr(t, t) == 0.0);

    // With self-pairs excluded the copy no longer scores zero for free.
    double excl = nndr(t, t, true);
    CHECK(excl == doctest::Approx(oracle::nndr_bruteforce(t, t, true)).epsilon(1e-12));
    CHECK(excl > 0.0);
}

TEST_CASE("nndr validates its inputs") {
    Table t = random_mixed(10, 3);
    TableBuilder one;
    one.add_numeric("a", {1.0});
    CHECK_THROWS_AS((void)nndr(t, one.build()), TooFewReferenceRows);

    TableBuilder two;
    two.add_numeric("a", {1.0, 2.0});
    two.add_numeric("b", {1.0, 2.0});
    CHECK_NOTHROW((void)nndr(t, two.build()));
    // Excluding self-pairs needs a third reference row.
    CHECK_THROWS_AS((void)nndr(t, two.build(), true), TooFewReferenceRows);

    TableBuilder disjoint;
    disjoint.add_numeric("zz", {1.0, 2.0, 3.0});
    CHECK_THROWS_AS((void)nndr(t, disjoint.build()), NoSharedColumns);
}

TEST_CASE("nndr ignores columns that differ in kind and scales on the reference") {
    // Column "a" is numeric in one table and categorical in the other, so only
    // "b" is compared; with one shared numeric column the ratio is scale-free.
    TableBuilder s;
    s.add_categorical("a", {"1", "2"});
    s.add_numeric("b", {0.0, 100.0});
    Table synth = s.build();

    TableBuilder r;
    r.add_numeric("a", {9.0, 9.0, 9.0});
    r.add_numeric("b", {0.0, 50.0, 100.0});
    Table reference = r.build();

    double got = nndr(synth, reference);
    // Row 0: nearest 0 at distance 0 -> ratio 0. Row 1: distances 0, 50, 100
    // scaled; ratio = 0 / 50 = 0 after the zero-distance match.
    CHECK(got == doctest::Approx(oracle::nndr_bruteforce(synth, reference)).epsilon(1e-12));
    CHECK(got == 0.0);
}

TEST_CASE("privacy report flags train-test asymmetry") {
    Table train = random_mixed(40, 11);
    Table test = random_mixed(40, 12);

    // Synthetic rows copied straight from training: train ratio 0, test ratio healthy.
    std::vector<std::size_t> first{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Table copied = train.select_rows(first);
    PrivacyResult leak = privacy_report(copied, train, test, 0.04);
    CHECK(leak.train_nndr == 0.0);
    CHECK(leak.test_nndr > 0.05);
    CHECK(leak.overfit_flag);
    CHECK(leak.band == 0.04);

    // Independent synthetic rows look alike from both sides.
    Table fresh = random_mixed(40, 13);
    PrivacyResult fine = privacy_report(fresh, train, test, 0.5);
    CHECK_FALSE(fine.overfit_flag);
    CHECK(std::fabs(fine.train_nndr - fine.test_nndr) <= 0.5);
}

TEST_CASE("distinguishability of matched samples sits near chance") {
    // Independent draws from the same process; a literal row-for-row copy
    // would instead let the forest memorize duplicate rows and invert the
    // scores, which is not the behaviour under test here.
    Table real = testdata::two_class_gaussian(240, 31);
    Table synth = testdata::two_class_gaussian(240, 33);
    ClassifierSpec spec;
    spec.forest.n_trees = 40;

    DistinguishabilityResult res = distinguishability(real, synth, spec, 5);
    CHECK(res.classifier == "random_forest");
    CHECK(res.n_real == res.n_synth);
    CHECK(res.roc_auc > 0.3);
    CHECK(res.roc_auc < 0.7);

    // A strong shift is easy to detect.
    Table shifted = testdata::gaussian_cloud(240, 2, 32, 30.0);
    TableBuilder b;
    b.add_numeric("x", shifted.numeric_column(0).to_vector());
    b.add_numeric("y", shifted.numeric_column(1).to_vector());
    Table far = b.build();
    TableBuilder rb;
    rb.add_numeric("x", real.numeric_column(0).to_vector());
    rb.add_numeric("y", real.numeric_column(1).to_vector());
    Table real_numeric = rb.build();
    DistinguishabilityResult hot = distinguishability(real_numeric, far, spec, 5);
    CHECK(hot.roc_auc > 0.95);
    CHECK(hot.f1_synthetic > 0.9);
}

TEST_CASE("distinguishability is deterministic and needs enough rows") {
    Table real = testdata::two_class_gaussian(80, 33);
    ClassifierSpec spec;
    spec.forest.n_trees = 20;
    auto a = distinguishability(real, real, spec, 9);
    auto b = distinguishability(real, real, spec, 9);
    CHECK(a.f1_synthetic == b.f1_synthetic);
    CHECK(a.roc_auc == b.roc_auc);

    Table tiny = testdata::two_class_gaussian(4, 34);
    CHECK_THROWS_AS((void)distinguishability(tiny, tiny, spec, 1), DegenerateInput);
}

TEST_CASE("utility suite runs the three protocols") {
    CHECK(std::string(utility_protocol_name(UtilityProtocol::TrainRealTestReal)) ==
          "train_real_test_real");
    CHECK(std::string(utility_protocol_name(UtilityProtocol::TrainRealTestSynth)) ==
          "train_real_test_synth");
    CHECK(std::string(utility_protocol_name(UtilityProtocol::TrainSynthTestReal)) ==
          "train_synth_test_real");

    Table all = testdata::two_class_gaussian(300, 35);
    SplitSpec split;
    split.test_fraction = 0.25;
    split.stratify_on = "cls";
    split.seed = 1;
    auto [train, test] = stratified_split(all, split);
    Table synth = testdata::two_class_gaussian(225, 36);

    ClassifierSpec spec;
    spec.forest.n_trees = 40;
    auto suite = utility_suite(train, test, synth, spec, 7);
    CHECK(suite[0].protocol == UtilityProtocol::TrainRealTestReal);
    CHECK(suite[1].protocol == UtilityProtocol::TrainRealTestSynth);
    CHECK(suite[2].protocol == UtilityProtocol::TrainSynthTestReal);

    for (const auto& r : suite) {
        CHECK(r.classifier == "random_forest");
        CHECK(r.missing_classes.empty());
        // Fresh draws of the same separable distribution: every protocol scores high.
        CHECK(r.test.f1 > 0.9);
        CHECK(r.test.roc_auc > 0.95);
        CHECK(r.train.f1 > 0.9);
    }

    // Real->real and real->synth share one model trained on the real rows.
    CHECK(suite[0].train.f1 == suite[1].train.f1);
}

TEST_CASE("utility suite reports class mismatches") {
    Table train = testdata::two_class_gaussian(60, 37);
    Table test = testdata::two_class_gaussian(40, 38);

    // Synthetic data with one foreign class and one training class missing.
    TableBuilder b;
    std::vector<double> x, y;
    std::vector<std::string> seg, cls;
    Rng rng(39);
    for (int i = 0; i < 30; ++i) {
        x.push_back(rng.normal());
        y.push_back(rng.normal());
        seg.push_back("a");
        cls.push_back(i % 2 ? "pos" : "other");
    }
    b.add_numeric("x", std::move(x));
    b.add_numeric("y", std::move(y));
    b.add_categorical("seg", seg);
    b.add_categorical("cls", cls, ColumnRole::Label);
    Table synth = b.build();

    ClassifierSpec spec;
    spec.forest.n_trees = 10;
    auto suite = utility_suite(train, test, synth, spec, 3);
    // Model trained on real knows {neg, pos}; synthetic data lacks neg and
    // adds "other".
    const auto& trts = suite[1];
    bool saw_other = false;
    bool saw_neg = false;
    for (const auto& c : trts.missing_classes) {
        if (c == "other") saw_other = true;
        if (c == "neg") saw_neg = true;
    }
    CHECK(saw_other);
    CHECK(saw_neg);
}
