#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "support/oracles.hpp"
#include "support/testdata.hpp"
#include "tabeval/errors.hpp"
#include "tabeval/learners.hpp"
#include "tabeval/rng.hpp"

using namespace tabeval;

namespace {

/// Fixed-output classifier for metric arithmetic checks.
class CannedModel : public Classifier {
public:
    CannedModel(std::vector<std::string> classes, Matrix probs)
        : classes_(std::move(classes)), probs_(std::move(probs)) {}
    const std::vector<std::string>& classes() const override { return classes_; }
    Matrix predict_proba(const Table&) const override { return probs_; }
    std::string name() const override { return "canned"; }

private:
    std::vector<std::string> classes_;
    Matrix probs_;
};

}  // namespace

TEST_CASE("cross-entropy losses hit their closed-form anchors") {
    Matrix truth(1, 2), pred(1, 2);
    truth(0, 0) = 1.0;
    pred(0, 0) = 0.5;
    pred(0, 1) = 0.5;
    CHECK(cce_loss(truth, pred) == doctest::Approx(-1.0).epsilon(1e-14));

    Matrix t4(2, 4), p4(2, 4);
    t4(0, 1) = 1.0;
    t4(1, 3) = 1.0;
    p4.fill(0.25);
    CHECK(cce_loss(t4, p4) == doctest::Approx(-2.0).epsilon(1e-14));

    std::vector<double> ones{1.0, 0.0};
    std::vector<double> half{0.5, 0.5};
    CHECK(bce_loss(ones, half) == doctest::Approx(-1.0).epsilon(1e-14));
    // Perfectly confident and correct: zero loss.
    Matrix sure(1, 2);
    sure(0, 0) = 1.0;
    CHECK(cce_loss(truth, sure) == 0.0);

    Matrix wrong_shape(1, 3);
    CHECK_THROWS_AS((void)cce_loss(truth, wrong_shape), ShapeMismatch);
}

TEST_CASE("feature space aligns columns by name and flags unseen categories") {
    Table train = testdata::small_mixed();
    auto space = FeatureSpace::from(train);
    CHECK(space.n_numeric() == 2);
    CHECK(space.n_categorical() == 1);  // label excluded
    CHECK(space.one_hot_width() == 2 + 3);

    TableBuilder b;
    b.add_categorical("color", {"green", "violet"});
    b.add_numeric("income", {1.0, 2.0});
    b.add_numeric("age", {3.0, 4.0});
    Table other = b.build();
    auto aligned = space.align(other);
    CHECK(aligned.numeric(0, 0) == 3.0);   // age first, training order
    CHECK(aligned.numeric(0, 1) == 1.0);
    CHECK(aligned.categorical[0][0] == 2); // green in training dictionary
    CHECK(aligned.categorical[0][1] == -1);

    Matrix hot = space.one_hot(other);
    REQUIRE(hot.cols() == 5);
    CHECK(hot(0, 2 + 2) == 1.0);  // green indicator
    CHECK(hot(1, 2) == 0.0);      // unseen category: all-zero block
    CHECK(hot(1, 3) == 0.0);
    CHECK(hot(1, 4) == 0.0);
}

TEST_CASE("logistic gradients match finite differences") {
    Table train = testdata::two_class_gaussian(40, 3);
    LogisticHyperparams hp;
    hp.epochs = 5;
    LogisticModel m = train_logistic(train, hp);

    Matrix x = m.space.one_hot(train);
    auto codes = train.codes(train.label_index());
    std::vector<std::int32_t> y(codes.begin(), codes.end());

    Matrix gw;
    std::vector<double> gb;
    m.loss_and_gradients(x, y, gw, gb);

    auto loss_at = [&] {
        Matrix tw;
        std::vector<double> tb;
        return m.loss_and_gradients(x, y, tw, tb);
    };
    // A spread of weight coordinates plus every bias.
    for (std::size_t c = 0; c < m.weights.rows(); ++c) {
        for (std::size_t j = 0; j < m.weights.cols(); j += 2) {
            double fd = oracle::central_diff(loss_at, m.weights(c, j));
            CHECK(oracle::rel_err(gw(c, j), fd) < 1e-5);
        }
        double fd_b = oracle::central_diff(loss_at, m.biases[c]);
        CHECK(oracle::rel_err(gb[c], fd_b) < 1e-5);
    }
}

TEST_CASE("both classifiers learn well-separated classes") {
    Table train = testdata::two_class_gaussian(200, 1);
    Table test = testdata::two_class_gaussian(100, 2);

    LogisticModel lm = train_logistic(train);
    MetricsBundle lb = evaluate(lm, test);
    CHECK(lb.macro_f1 > 0.95);
    CHECK(lb.macro_roc_auc > 0.99);

    ForestHyperparams fh;
    fh.n_trees = 30;
    ForestModel fm = train_forest(train, fh);
    MetricsBundle fb = evaluate(fm, test);
    CHECK(fb.macro_f1 > 0.95);
    CHECK(fb.macro_roc_auc > 0.99);
    CHECK(fm.name() == "random_forest");

    // Same hyperparameters and seed give the same forest.
    ForestModel fm2 = train_forest(train, fh);
    Matrix p1 = fm.predict_proba(test);
    Matrix p2 = fm2.predict_proba(test);
    for (std::size_t i = 0; i < p1.rows(); ++i)
        CHECK(p1(i, 0) == p2(i, 0));
}

TEST_CASE("rank-statistic AUC equals pair counting exactly") {
    Rng rng(77);
    for (int instance = 0; instance < 100; ++instance) {
        std::size_t n = 5 + rng.below(40);
        std::vector<double> scores(n);
        std::vector<std::uint8_t> pos(n);
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse grid scores force plenty of ties.
            scores[i] = static_cast<double>(rng.below(8)) / 4.0;
            pos[i] = rng.uniform() < 0.5 ? 1 : 0;
            n_pos += pos[i];
        }
        if (n_pos == 0) pos[0] = 1;
        if (n_pos == n) pos[0] = 0;
        CHECK(roc_auc_rank(scores, pos) == oracle::auc_pair_count(scores, pos));
    }
    std::vector<double> s{1.0, 2.0};
    std::vector<std::uint8_t> all_pos{1, 1};
    CHECK_THROWS_AS((void)roc_auc_rank(s, all_pos), DegenerateInput);
}

TEST_CASE("evaluate computes macro metrics from the confusion counts") {
    TableBuilder b;
    b.add_numeric("x", {0.0, 1.0, 2.0, 3.0});
    b.add_categorical("cls", {"a", "a", "b", "b"}, ColumnRole::Label);
    Table test = b.build();

    Matrix probs(4, 2);
    probs(0, 0) = 0.9; probs(0, 1) = 0.1;  // a, right
    probs(1, 0) = 0.4; probs(1, 1) = 0.6;  // a, predicted b
    probs(2, 0) = 0.2; probs(2, 1) = 0.8;  // b, right
    probs(3, 0) = 0.3; probs(3, 1) = 0.7;  // b, right
    CannedModel model({"a", "b"}, probs);

    MetricsBundle m = evaluate(model, test);
    REQUIRE(m.per_class.size() == 2);
    CHECK(m.per_class[0].precision == doctest::Approx(1.0));
    CHECK(m.per_class[0].recall == doctest::Approx(0.5));
    CHECK(m.per_class[0].f1 == doctest::Approx(2.0 / 3.0));
    CHECK(m.per_class[1].precision == doctest::Approx(2.0 / 3.0));
    CHECK(m.per_class[1].recall == doctest::Approx(1.0));
    CHECK(m.per_class[1].f1 == doctest::Approx(0.8));
    CHECK(m.macro_precision == doctest::Approx(5.0 / 6.0));
    CHECK(m.macro_recall == doctest::Approx(0.75));
    CHECK(m.macro_f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2.0));
    CHECK(m.macro_roc_auc == doctest::Approx(1.0));
    CHECK(m.absent_classes.empty());
    CHECK(m.unknown_classes.empty());
}

TEST_CASE("evaluate tracks absent and unknown classes") {
    TableBuilder b;
    b.add_numeric("x", {0.0, 1.0, 2.0});
    b.add_categorical("cls", {"a", "a", "mystery"}, ColumnRole::Label);
    Table test = b.build();

    Matrix probs(3, 2);
    for (std::size_t i = 0; i < 3; ++i) { probs(i, 0) = 0.9; probs(i, 1) = 0.1; }
    CannedModel model({"a", "b"}, probs);
    MetricsBundle m = evaluate(model, test);
    CHECK(m.absent_classes == std::vector<std::string>{"b"});
    CHECK(m.unknown_classes == std::vector<std::string>{"mystery"});
    // Class a: both predicted for the mystery row and correct on its own rows.
    CHECK(m.per_class[0].recall == doctest::Approx(1.0));
}

TEST_CASE("metric range bands are inclusive") {
    std::vector<double> stable{0.96, 0.99};
    auto r1 = metric_range(stable, 0.04);
    CHECK(r1.min == 0.96);
    CHECK(r1.max == 0.99);
    CHECK(r1.stable);

    std::vector<double> wobbly{0.90, 0.95};
    CHECK_FALSE(metric_range(wobbly, 0.04).stable);

    // Exactly representable spread equal to the band: inclusive boundary.
    std::vector<double> edge{0.5, 0.53125};
    CHECK(metric_range(edge, 0.03125).stable);
}

TEST_CASE("cross validation runs k folds deterministically") {
    Table t = testdata::two_class_gaussian(120, 9);
    ClassifierSpec spec;
    spec.kind = ClassifierSpec::Kind::Logistic;
    spec.logistic.epochs = 40;

    auto cv = cross_validate(t, spec, 5, 0.04, 3);
    REQUIRE(cv.folds.size() == 5);
    CHECK(cv.stability_band == 0.04);
    CHECK(cv.f1.min <= cv.f1.max);
    CHECK(cv.f1.min > 0.9);  // separable data scores high on every fold

    auto again = cross_validate(t, spec, 5, 0.04, 3);
    for (std::size_t f = 0; f < 5; ++f)
        CHECK(cv.folds[f].macro_f1 == again.folds[f].macro_f1);
}
