#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "support/testdata.hpp"
#include "tabeval/errors.hpp"
#include "tabeval/generators.hpp"
#include "tabeval/quality.hpp"
#include "tabeval/rng.hpp"

using namespace tabeval;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void check_tables_equal(const Table& a, const Table& b) {
    REQUIRE(a.n_rows() == b.n_rows());
    REQUIRE(a.schema() == b.schema());
    for (std::size_t c = 0; c < a.n_cols(); ++c) {
        if (a.kind(c) == ColumnKind::Numeric) {
            CHECK(a.numeric_column(c).to_vector() == b.numeric_column(c).to_vector());
        } else {
            CHECK(a.dictionary(c) == b.dictionary(c));
            auto ca = a.codes(c);
            auto cb = b.codes(c);
            for (std::size_t i = 0; i < a.n_rows(); ++i) CHECK(ca[i] == cb[i]);
        }
    }
}

/// Checks every parameter gradient of one pass against central differences.
void check_pass_gradients(GanTrainer& tr, const GanBatch& batch, bool disc_side,
                          const char* tag) {
    Mlp grads;
    std::size_t clamps = 0;
    if (disc_side) tr.discriminator_pass(batch, grads, clamps);
    else tr.generator_pass(batch, grads, clamps);

    auto loss_now = [&] {
        Mlp tmp;
        std::size_t cl = 0;
        return disc_side ? tr.discriminator_pass(batch, tmp, cl)
                         : tr.generator_pass(batch, tmp, cl);
    };
    Mlp& net = disc_side ? tr.discriminator_net() : tr.generator_net();
    auto check_one = [&](double an, double fd, const std::string& where) {
        bool ok = oracle::rel_err(an, fd) < 1e-4 || std::fabs(an - fd) < 1e-6;
        std::string msg = std::string(tag) + " " + where + ": analytic " +
                          std::to_string(an) + " vs fd " + std::to_string(fd);
        CHECK_MESSAGE(ok, msg);
    };
    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].rows(); ++i)
            for (std::size_t j = 0; j < net.weights[l].cols(); ++j) {
                double fd = oracle::central_diff(loss_now, net.weights[l](i, j));
                check_one(grads.weights[l](i, j), fd,
                          "w" + std::to_string(l) + "(" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
            }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            double fd = oracle::central_diff(loss_now, net.biases[l][i]);
            check_one(grads.biases[l][i], fd, "b" + std::to_string(l) + "[" + std::to_string(i) + "]");
        }
    }
}

GanSpec tiny_spec(GanObjective obj, std::uint64_t seed) {
    GanSpec spec;
    spec.objective = obj;
    spec.noise_dim = 3;
    spec.gen_hidden = {6};
    spec.disc_hidden = {5};
    spec.batch_size = 6;
    spec.epochs = 2;
    spec.step_size = 0.01;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("mlp forward matches a hand computation") {
    Rng rng(1);
    Mlp net = Mlp::init({2, 2, 1}, 0.5, rng);
    net.weights[0](0, 0) = 1.0; net.weights[0](0, 1) = 0.0;
    net.weights[0](1, 0) = 0.0; net.weights[0](1, 1) = 1.0;
    net.biases[0] = {0.0, -1.0};
    net.weights[1](0, 0) = 2.0; net.weights[1](0, 1) = 3.0;
    net.biases[1] = {0.5};

    Matrix x(1, 2);
    x(0, 0) = 1.0;
    x(0, 1) = 0.5;
    auto fw = net.forward(x);
    // Hidden pre-activations (1, -0.5); leaky slope 0.5 gives posts (1, -0.25).
    CHECK(fw.pre[0](0, 0) == doctest::Approx(1.0));
    CHECK(fw.pre[0](0, 1) == doctest::Approx(-0.5));
    CHECK(fw.output()(0, 0) == doctest::Approx(2.0 * 1.0 + 3.0 * -0.25 + 0.5));
}

TEST_CASE("mlp backward matches finite differences including input gradients") {
    Rng rng(3);
    Mlp net = Mlp::init({3, 4, 2}, 0.2, rng);
    Matrix x(5, 3);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.normal();

    // Scalar loss: sum of all outputs, so d_output is all ones.
    auto loss_of = [&] {
        auto fw = net.forward(x);
        double s = 0.0;
        for (std::size_t i = 0; i < fw.output().rows(); ++i)
            for (std::size_t j = 0; j < fw.output().cols(); ++j) s += fw.output()(i, j);
        return s;
    };

    auto fw = net.forward(x);
    Mlp grads = Mlp::zeros_like(net);
    Matrix d_out(5, 2);
    d_out.fill(1.0);
    Matrix d_input = net.backward(fw, d_out, grads);

    for (std::size_t l = 0; l < net.n_layers(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].rows(); ++i)
            for (std::size_t j = 0; j < net.weights[l].cols(); ++j) {
                double fd = oracle::central_diff(loss_of, net.weights[l](i, j));
                CHECK(oracle::rel_err(grads.weights[l](i, j), fd) < 1e-5);
            }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            double fd = oracle::central_diff(loss_of, net.biases[l][i]);
            CHECK(oracle::rel_err(grads.biases[l][i], fd) < 1e-5);
        }
    }
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            double fd = oracle::central_diff(loss_of, x(i, j));
            CHECK(oracle::rel_err(d_input(i, j), fd) < 1e-5);
        }

    CHECK_THROWS_AS((void)Mlp::init({4}, 0.2, rng), DomainError);
}

TEST_CASE("gan gradients match finite differences for every objective") {
    struct Case {
        GanObjective obj;
        bool saturating;
        const char* tag;
    };
    const Case cases[] = {
        {GanObjective::Vanilla, false, "vanilla"},
        {GanObjective::Vanilla, true, "vanilla-saturating"},
        {GanObjective::Conditional, false, "conditional"},
        {GanObjective::Wasserstein, false, "wasserstein"},
        {GanObjective::WassersteinGP, false, "wasserstein-gp"},
        {GanObjective::FGanKL, false, "fgan-kl"},
        {GanObjective::FGanSquaredHellinger, false, "fgan-h2"},
    };
    std::uint64_t idx = 0;
    for (const auto& c : cases) {
        CAPTURE(c.tag);
        Table train = testdata::two_class_gaussian(32, 40 + idx);
        GanSpec spec = tiny_spec(c.obj, 100 + idx);
        spec.saturating_generator = c.saturating;
        GanTrainer tr(train, spec);
        std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
        Rng rng(derive_seed(spec.seed, "test_batch"));
        GanBatch batch = tr.make_batch(rows, rng);
        if (c.obj == GanObjective::WassersteinGP) REQUIRE(batch.eps.size() == rows.size());

        check_pass_gradients(tr, batch, true, c.tag);
        check_pass_gradients(tr, batch, false, c.tag);
        ++idx;
    }
}

TEST_CASE("closed-form anchors at a zeroed discriminator") {
    std::vector<double> half{0.5};
    CHECK(vanilla_gan_risk(half, half) == doctest::Approx(2.0 * std::log(0.5)).epsilon(1e-12));
    std::vector<double> empty;
    CHECK_THROWS_AS((void)vanilla_gan_risk(empty, half), DegenerateInput);

    Table train = testdata::two_class_gaussian(32, 1);
    GanSpec spec = tiny_spec(GanObjective::Vanilla, 5);
    GanTrainer tr(train, spec);
    tr.discriminator_net().zero();

    std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
    Rng rng(7);
    GanBatch batch = tr.make_batch(rows, rng);
    Mlp grads;
    std::size_t clamps = 0;
    // All discriminator outputs are 0, so both probabilities are one half and
    // the descent loss is -2 ln(1/2).
    double d_loss = tr.discriminator_pass(batch, grads, clamps);
    CHECK(d_loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    double g_loss = tr.generator_pass(batch, grads, clamps);
    CHECK(g_loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    GanSpec sat = spec;
    sat.saturating_generator = true;
    GanTrainer trs(train, sat);
    trs.discriminator_net().zero();
    Rng rng2(7);
    GanBatch batch2 = trs.make_batch(rows, rng2);
    double g_sat = trs.generator_pass(batch2, grads, clamps);
    CHECK(g_sat == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("wasserstein training keeps critic weights inside the clip box") {
    Table train = testdata::two_class_gaussian(48, 2);
    GanSpec spec = tiny_spec(GanObjective::Wasserstein, 3);
    spec.epochs = 3;
    spec.critic_steps = 2;
    spec.clip = 0.01;
    GanTrainer tr(train, spec);
    tr.run();
    const Mlp& critic = tr.discriminator_net();
    for (std::size_t l = 0; l < critic.n_layers(); ++l) {
        for (std::size_t i = 0; i < critic.weights[l].rows(); ++i)
            for (std::size_t j = 0; j < critic.weights[l].cols(); ++j)
                CHECK(std::fabs(critic.weights[l](i, j)) <= spec.clip + 1e-15);
        for (double b : critic.biases[l]) CHECK(std::fabs(b) <= spec.clip + 1e-15);
    }
}

TEST_CASE("f-gan passes count domain clamps on extreme outputs") {
    Table train = testdata::two_class_gaussian(16, 4);
    GanSpec spec = tiny_spec(GanObjective::FGanKL, 6);
    GanTrainer tr(train, spec);
    tr.discriminator_net().zero();
    tr.discriminator_net().biases.back()[0] = 1e9;  // every output far past the cap

    std::vector<std::size_t> rows{0, 1, 2, 3};
    Rng rng(8);
    GanBatch batch = tr.make_batch(rows, rng);
    Mlp grads;
    std::size_t clamps = 0;
    double loss = tr.discriminator_pass(batch, grads, clamps);
    CHECK(clamps > 0);
    CHECK(std::isfinite(loss));
    // Clamped activations carry no gradient, so the parameters are untouched.
    for (std::size_t l = 0; l < grads.n_layers(); ++l)
        for (std::size_t i = 0; i < grads.weights[l].rows(); ++i)
            for (std::size_t j = 0; j < grads.weights[l].cols(); ++j)
                CHECK(grads.weights[l](i, j) == 0.0);
}

TEST_CASE("divergence surfaces as a structured error with the trace attached") {
    Table train = testdata::two_class_gaussian(24, 9);
    GanSpec spec = tiny_spec(GanObjective::WassersteinGP, 11);
    spec.step_size = 1e3;
    spec.epochs = 10;
    GanTrainer tr(train, spec);
    bool threw = false;
    try {
        tr.run();
    } catch (const GanDiverged& e) {
        threw = true;
        CHECK(e.trace.n_rows == 24);
        CHECK(e.trace.n_numeric_features == 2);
        CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    }
    CHECK(threw);
}

TEST_CASE("training trace covers every batch") {
    Table train = testdata::two_class_gaussian(30, 12);
    GanSpec spec = tiny_spec(GanObjective::Vanilla, 13);
    spec.batch_size = 8;
    spec.epochs = 3;
    GanTrainer tr(train, spec);
    TrainTrace trace = tr.run();
    REQUIRE(trace.steps.size() == 3 * 4);  // ceil(30 / 8) batches per epoch
    REQUIRE(trace.epochs.size() == 3);
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        CHECK(trace.steps[s].step == s);
        CHECK(trace.steps[s].epoch == s / 4);
        CHECK(std::isfinite(trace.steps[s].d_loss));
    }

    std::string path = temp_path("tabeval_trace.csv");
    write_trace_csv(trace, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "step,epoch,d_loss,g_loss");
    std::size_t rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == trace.steps.size());
    std::remove(path.c_str());
}

TEST_CASE("trainer validates its configuration") {
    Table train = testdata::two_class_gaussian(16, 14);
    GanSpec spec = tiny_spec(GanObjective::Vanilla, 1);
    spec.noise_dim = 0;
    CHECK_THROWS_AS(GanTrainer(train, spec), DomainError);
    spec = tiny_spec(GanObjective::Vanilla, 1);
    spec.batch_size = 1;
    CHECK_THROWS_AS(GanTrainer(train, spec), DomainError);
    spec = tiny_spec(GanObjective::Vanilla, 1);
    spec.step_size = 0.0;
    CHECK_THROWS_AS(GanTrainer(train, spec), DomainError);
    spec = tiny_spec(GanObjective::Vanilla, 1);
    spec.gen_hidden = {8, 0};
    CHECK_THROWS_AS(GanTrainer(train, spec), DomainError);

    Table unlabeled = testdata::gaussian_cloud(16, 2, 15);
    CHECK_THROWS_AS(GanTrainer(unlabeled, tiny_spec(GanObjective::Conditional, 1)),
                    MissingLabels);
    // Unconditional objectives accept unlabeled data.
    GanTrainer ok(unlabeled, tiny_spec(GanObjective::Vanilla, 1));
    CHECK(ok.base().has_label == false);
}

TEST_CASE("gmm fitting validates inputs") {
    Table train = testdata::two_class_gaussian(20, 16);
    CHECK_THROWS_AS((void)fit_gmm(train, 0), DomainError);
    CHECK_THROWS_AS((void)fit_gmm(train.without_label_role(), 1), NoLabelColumn);

    TableBuilder b;
    b.add_categorical("c", {"x", "y"});
    b.add_categorical("cls", {"a", "b"}, ColumnRole::Label);
    CHECK_THROWS_AS((void)fit_gmm(b.build(), 1), NoNumericColumns);
}

TEST_CASE("gmm component count follows the per-class data size") {
    Table train = testdata::two_class_gaussian(30, 17);
    GmmSampler m3 = fit_gmm(train, 3, 1e-6, 1);
    REQUIRE(m3.mixtures.size() == 2);
    for (const auto& cls : m3.mixtures) {
        CHECK(cls.components.size() == 3);
        double wsum = 0.0;
        for (const auto& comp : cls.components) wsum += comp.weight;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-9));
    }

    // 4 rows per class cannot support k = 5; the fit falls back to one component.
    Table small = testdata::two_class_gaussian(8, 18);
    GmmSampler m5 = fit_gmm(small, 5, 1e-6, 1);
    for (const auto& cls : m5.mixtures) CHECK(cls.components.size() == 1);
}

TEST_CASE("gmm sampling follows requested proportions exactly") {
    Table train = testdata::two_class_gaussian(400, 19);
    GmmSampler model = fit_gmm(train, 1, 1e-6, 2);

    Table match = sample_gmm(model, 10, Proportions::MatchReal, 3);
    auto dist = label_distribution(match);
    REQUIRE(dist.categories == std::vector<std::string>{"neg", "pos"});
    CHECK(dist.proportions[0] == doctest::Approx(0.5));

    // Uniform over 2 classes with n = 7: the tie goes to the first class.
    Table uni = sample_gmm(model, 7, Proportions::Uniform, 3);
    auto udist = label_distribution(uni);
    CHECK(udist.proportions[0] == doctest::Approx(4.0 / 7.0));
    CHECK(udist.proportions[1] == doctest::Approx(3.0 / 7.0));

    // The sampled table reproduces the training schema.
    REQUIRE(match.schema() == train.schema());
    CHECK(match.dictionary(match.column_index("seg")) ==
          train.dictionary(train.column_index("seg")));
}

TEST_CASE("gmm samples recover well-separated classes") {
    Table train = testdata::two_class_gaussian(400, 20);
    GmmSampler model = fit_gmm(train, 2, 1e-6, 4);
    Table synth = sample_gmm(model, 400, Proportions::MatchReal, 5);

    QualityReport q = quality_report(train, synth);
    CHECK(q.overall >= 0.9);

    // Class-conditional means land near the true centers (0 and 6).
    std::size_t label = synth.label_index();
    auto codes = synth.codes(label);
    std::size_t xs = synth.column_index("x");
    double mean_neg = 0.0, mean_pos = 0.0;
    std::size_t n_neg = 0, n_pos = 0;
    for (std::size_t i = 0; i < synth.n_rows(); ++i) {
        double v = synth.numeric_column(xs)[i];
        if (synth.dictionary(label)[static_cast<std::size_t>(codes[i])] == "pos") {
            mean_pos += v;
            ++n_pos;
        } else {
            mean_neg += v;
            ++n_neg;
        }
    }
    mean_pos /= static_cast<double>(n_pos);
    mean_neg /= static_cast<double>(n_neg);
    CHECK(std::fabs(mean_pos - 6.0) < 1.0);
    CHECK(std::fabs(mean_neg - 0.0) < 1.0);
}

TEST_CASE("gmm sampling is deterministic in the seed") {
    Table train = testdata::two_class_gaussian(100, 21);
    GmmSampler model = fit_gmm(train, 2, 1e-6, 6);
    Table a = sample_gmm(model, 50, Proportions::MatchReal, 7);
    Table b = sample_gmm(model, 50, Proportions::MatchReal, 7);
    check_tables_equal(a, b);
    Table c = sample_gmm(model, 50, Proportions::MatchReal, 8);
    CHECK(a.numeric_column(0).to_vector() != c.numeric_column(0).to_vector());

    GmmSampler refit = fit_gmm(train, 2, 1e-6, 6);
    Table d = sample_gmm(refit, 50, Proportions::MatchReal, 7);
    check_tables_equal(a, d);
}

TEST_CASE("conditional gan sampling honors the requested labels") {
    Table train = testdata::two_class_gaussian(64, 22);
    GanSpec spec = tiny_spec(GanObjective::Conditional, 23);
    spec.epochs = 2;
    auto [model, trace] = train_gan(train, spec);
    CHECK(trace.steps.size() == 2 * (64 / 6 + 1));

    std::vector<std::string> wanted{"pos", "neg", "pos", "pos"};
    Table out = sample_gan(model, wanted, 9);
    REQUIRE(out.n_rows() == 4);
    std::size_t label = out.label_index();
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(out.dictionary(label)[static_cast<std::size_t>(out.codes(label)[i])] == wanted[i]);

    CHECK_THROWS_AS((void)sample_gan(model, {"ghost"}, 1), CategoryMismatch);

    Table counted = sample_gan(model, 10, Proportions::Uniform, 2);
    auto dist = label_distribution(counted);
    CHECK(dist.proportions[0] == doctest::Approx(0.5));

    // Unlabeled models cannot honor label requests.
    Table unlabeled = testdata::gaussian_cloud(32, 2, 24);
    auto [umodel, utrace] = train_gan(unlabeled, tiny_spec(GanObjective::Vanilla, 25));
    CHECK_THROWS_AS((void)sample_gan(umodel, {"pos"}, 1), MissingLabels);
    Table usample = sample_gan(umodel, 12, Proportions::MatchReal, 3);
    CHECK(usample.n_rows() == 12);
    CHECK_FALSE(usample.has_label());
}

TEST_CASE("model files round-trip through save and load") {
    Table train = testdata::two_class_gaussian(80, 26);

    GmmSampler gmm = fit_gmm(train, 2, 1e-6, 1);
    std::string gmm_path = temp_path("tabeval_model_gmm.json");
    save_gmm(gmm, gmm_path);
    CHECK(peek_model_type(gmm_path) == ModelType::Gmm);
    GmmSampler gmm2 = load_gmm(gmm_path);
    check_tables_equal(sample_gmm(gmm, 40, Proportions::MatchReal, 4),
                       sample_gmm(gmm2, 40, Proportions::MatchReal, 4));

    GanSpec spec = tiny_spec(GanObjective::Conditional, 27);
    spec.epochs = 1;
    auto [gan, trace] = train_gan(train, spec);
    std::string gan_path = temp_path("tabeval_model_gan.json");
    save_gan(gan, gan_path);
    CHECK(peek_model_type(gan_path) == ModelType::Gan);
    GanModel gan2 = load_gan(gan_path);
    check_tables_equal(sample_gan(gan, 30, Proportions::MatchReal, 5),
                       sample_gan(gan2, 30, Proportions::MatchReal, 5));

    // Loading a model file as the wrong type is rejected.
    CHECK_THROWS_AS((void)load_gmm(gan_path), Unsupported);
    CHECK_THROWS_AS((void)load_gan(gmm_path), Unsupported);

    std::remove(gmm_path.c_str());
    std::remove(gan_path.c_str());
}

TEST_CASE("model loader rejects foreign files") {
    CHECK_THROWS_AS((void)load_gmm(temp_path("tabeval_no_such_model.json")), EmptyFile);

    std::string bad = temp_path("tabeval_bad_model.json");
    {
        std::ofstream out(bad);
        out << "{not json";
    }
    CHECK_THROWS_AS((void)load_gmm(bad), ParseError);
    {
        std::ofstream out(bad);
        out << "{\"format\": \"something-else\", \"version\": 1}";
    }
    CHECK_THROWS_AS((void)load_gmm(bad), Unsupported);
    std::remove(bad.c_str());
}
