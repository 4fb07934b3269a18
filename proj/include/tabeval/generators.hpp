#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabeval/errors.hpp"
#include "tabeval/ingest.hpp"
#include "tabeval/matrix.hpp"
#include "tabeval/rng.hpp"
#include "tabeval/table.hpp"

namespace tabeval {

enum class Proportions {
    MatchReal,  // class counts follow the training proportions
    Uniform,    // equal counts per class
};

/// Everything both samplers need to rebuild tables in the training schema:
/// column layout, fitted scaler, class list and per-class categorical
/// frequencies. Numeric features are modeled in robust-scaled space.
struct GeneratorBase {
    std::vector<ColumnSchema> schema;                    // training column order
    std::vector<std::string> numeric_feature_names;
    std::vector<std::string> cat_feature_names;
    std::vector<std::vector<std::string>> cat_dictionaries;  // per cat feature
    RobustScalerParams scaler;
    bool has_label = false;
    std::string label_name;
    std::vector<std::string> classes;                    // observed classes only
    std::vector<double> class_proportions;
    // cat_freqs[class][cat_feature][category]
    std::vector<std::vector<std::vector<double>>> cat_freqs;
};

struct GmmComponent {
    double weight;
    std::vector<double> mean;
    Matrix chol;  // lower Cholesky factor of the covariance
};

struct GmmClassModel {
    std::vector<GmmComponent> components;
};

struct GmmSampler {
    GeneratorBase base;
    std::size_t k = 1;       // requested components per class
    double ridge_scale = 1e-6;
    std::vector<GmmClassModel> mixtures;  // aligned with base.classes
};

/// Fits one Gaussian mixture per class with EM on robust-scaled numeric
/// features. Classes with fewer than k+1 rows fall back to a single
/// component. Categorical features keep their per-class frequencies.
GmmSampler fit_gmm(const Table& train, std::size_t k, double ridge_scale = 1e-6,
                   std::uint64_t seed = 0);

Table sample_gmm(const GmmSampler& model, std::size_t n, Proportions proportions,
                 std::uint64_t seed);

enum class GanObjective {
    Vanilla,
    Conditional,   // vanilla objective, class one-hot fed to both networks
    Wasserstein,
    WassersteinGP,
    FGanKL,
    FGanSquaredHellinger,
};

struct GanSpec {
    GanObjective objective = GanObjective::Vanilla;
    std::size_t noise_dim = 32;
    std::vector<std::size_t> gen_hidden = {64, 64};
    std::vector<std::size_t> disc_hidden = {64, 64};
    double leaky_slope = 0.2;
    std::size_t epochs = 20;
    std::size_t batch_size = 128;
    double step_size = 0.05;
    std::size_t critic_steps = 1;
    double clip = 0.01;        // Wasserstein weight clipping
    double gp_weight = 10.0;   // gradient penalty coefficient
    bool saturating_generator = false;  // vanilla only: minimize log(1 - D(G(z)))
    std::uint64_t seed = 0;
};

/// Fully-connected net with LeakyReLU hidden layers and a linear output,
/// trained by plain SGD with hand-written backpropagation.
struct Mlp {
    std::vector<Matrix> weights;               // layer l: out x in
    std::vector<std::vector<double>> biases;
    double leaky_slope = 0.2;

    static Mlp init(const std::vector<std::size_t>& sizes, double slope, Rng& rng);
    static Mlp zeros_like(const Mlp& other);

    struct Forward {
        std::vector<Matrix> pre;  // pre-activation per layer, n x out_l
        Matrix input;             // n x in_0
        const Matrix& output() const { return pre.back(); }
    };
    Forward forward(const Matrix& x) const;

    /// d_output is the loss gradient at the linear output. Parameter
    /// gradients accumulate into grads; the return value is the loss
    /// gradient at the input.
    Matrix backward(const Forward& fw, const Matrix& d_output, Mlp& grads) const;

    void sgd_step(const Mlp& grads, double step);
    void clip_weights(double c);
    void zero();
    std::size_t n_layers() const { return weights.size(); }
    std::size_t input_dim() const { return weights.front().cols(); }
    std::size_t output_dim() const { return weights.back().rows(); }
};

struct TrainStep {
    std::size_t step;
    std::size_t epoch;
    double d_loss;  // descent form: the value the discriminator update minimizes
    double g_loss;  // descent form for the generator
};

struct EpochSummary {
    std::size_t epoch;
    double d_loss_mean;
    double g_loss_mean;
};

struct TrainTrace {
    GanSpec spec;
    std::size_t n_rows = 0;
    std::size_t n_numeric_features = 0;
    std::vector<TrainStep> steps;
    std::vector<EpochSummary> epochs;
    std::size_t domain_clamps = 0;  // f-GAN activations clamped into domain
};

class GanDiverged : public NonFiniteLoss {
public:
    GanDiverged(const std::string& detail, TrainTrace trace)
        : NonFiniteLoss(detail), trace(std::move(trace)) {}
    TrainTrace trace;
};

struct GanModel {
    GeneratorBase base;
    GanSpec spec;
    Mlp generator;
};

/// Vanilla GAN value at given discriminator outputs (probabilities):
/// mean log d_real + mean log(1 - d_fake), natural log.
double vanilla_gan_risk(std::span<const double> d_real, std::span<const double> d_fake);

/// One training batch, fully determined so gradient checks can replay it.
struct GanBatch {
    Matrix real;              // scaled numeric features, m x p
    Matrix cond;              // one-hot class rows, m x C; 0 x 0 when unconditional
    Matrix noise;             // m x noise_dim
    std::vector<double> eps;  // per-row interpolation weights (WGAN-GP)
};

class GanTrainer {
public:
    GanTrainer(const Table& train, const GanSpec& spec);

    Mlp& generator_net() { return gen_; }
    Mlp& discriminator_net() { return disc_; }
    const GeneratorBase& base() const { return base_; }

    /// Discriminator descent loss and its parameter gradients for a fixed
    /// batch, at the current networks.
    double discriminator_pass(const GanBatch& b, Mlp& d_grads, std::size_t& clamps) const;

    /// Generator descent loss and its parameter gradients for a fixed batch.
    double generator_pass(const GanBatch& b, Mlp& g_grads, std::size_t& clamps) const;

    GanBatch make_batch(std::span<const std::size_t> rows, Rng& rng) const;

    TrainTrace run();
    GanModel finish() const;

private:
    GanSpec spec_;
    GeneratorBase base_;
    Matrix scaled_;                    // n x p numeric features, robust-scaled
    std::vector<std::int32_t> labels_; // class index per row (observed classes)
    Mlp gen_;
    Mlp disc_;
    bool conditional_ = false;
};

std::pair<GanModel, TrainTrace> train_gan(const Table& train, const GanSpec& spec);

Table sample_gan(const GanModel& model, std::size_t n, Proportions proportions,
                 std::uint64_t seed);
Table sample_gan(const GanModel& model, const std::vector<std::string>& labels,
                 std::uint64_t seed);

void write_trace_csv(const TrainTrace& trace, const std::string& path);

enum class ModelType { Gmm, Gan };

void save_gmm(const GmmSampler& model, const std::string& path);
GmmSampler load_gmm(const std::string& path);
void save_gan(const GanModel& model, const std::string& path);
GanModel load_gan(const std::string& path);
ModelType peek_model_type(const std::string& path);

}  // namespace tabeval
