#include "tabeval/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "tabeval/kernels.hpp"

namespace tabeval {

using json = nlohmann::ordered_json;

namespace {

GeneratorBase make_generator_base(const Table& train, std::vector<std::int32_t>& row_class) {
    if (train.n_rows() == 0) throw DegenerateInput("cannot fit a generator on an empty table");
    GeneratorBase base;
    base.schema = train.schema();
    for (std::size_t c = 0; c < train.n_cols(); ++c) {
        const auto& col = train.schema()[c];
        if (col.role == ColumnRole::Label) {
            if (train.kind(c) != ColumnKind::Categorical)
                throw SchemaMismatch("label column must be categorical");
            base.has_label = true;
            base.label_name = col.name;
            continue;
        }
        if (train.kind(c) == ColumnKind::Numeric) {
            base.numeric_feature_names.push_back(col.name);
        } else {
            base.cat_feature_names.push_back(col.name);
            base.cat_dictionaries.push_back(train.dictionary(c));
        }
    }
    if (base.numeric_feature_names.empty()) throw NoNumericColumns();
    base.scaler = fit_robust_scaler(train);

    row_class.assign(train.n_rows(), 0);
    if (base.has_label) {
        std::size_t label = train.label_index();
        const auto& dict = train.dictionary(label);
        auto codes = train.codes(label);
        std::vector<std::size_t> counts(dict.size(), 0);
        for (auto c : codes) ++counts[static_cast<std::size_t>(c)];
        std::vector<std::int32_t> remap(dict.size(), -1);
        for (std::size_t i = 0; i < dict.size(); ++i) {
            if (counts[i] == 0) continue;  // unseen categories cannot be modeled
            remap[i] = static_cast<std::int32_t>(base.classes.size());
            base.classes.push_back(dict[i]);
            base.class_proportions.push_back(static_cast<double>(counts[i]) /
                                             static_cast<double>(train.n_rows()));
        }
        for (std::size_t r = 0; r < train.n_rows(); ++r)
            row_class[r] = remap[static_cast<std::size_t>(codes[r])];
    } else {
        base.classes = {""};
        base.class_proportions = {1.0};
    }

    const std::size_t n_classes = base.classes.size();
    base.cat_freqs.assign(n_classes, {});
    std::vector<double> class_n(n_classes, 0.0);
    for (auto c : row_class) class_n[static_cast<std::size_t>(c)] += 1.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
        base.cat_freqs[c].resize(base.cat_feature_names.size());
        for (std::size_t j = 0; j < base.cat_feature_names.size(); ++j)
            base.cat_freqs[c][j].assign(base.cat_dictionaries[j].size(), 0.0);
    }
    for (std::size_t j = 0; j < base.cat_feature_names.size(); ++j) {
        std::size_t col = train.column_index(base.cat_feature_names[j]);
        auto codes = train.codes(col);
        for (std::size_t r = 0; r < train.n_rows(); ++r)
            base.cat_freqs[static_cast<std::size_t>(row_class[r])][j]
                          [static_cast<std::size_t>(codes[r])] += 1.0;
    }
    for (std::size_t c = 0; c < n_classes; ++c)
        for (auto& freqs : base.cat_freqs[c])
            for (double& f : freqs) f /= class_n[c];
    return base;
}

Matrix scaled_numeric_features(const Table& train, const GeneratorBase& base) {
    Matrix x(train.n_rows(), base.numeric_feature_names.size());
    for (std::size_t j = 0; j < base.numeric_feature_names.size(); ++j) {
        auto view = train.numeric_column(train.column_index(base.numeric_feature_names[j]));
        double med = base.scaler.median[j];
        double iqr = base.scaler.iqr[j];
        bool constant = base.scaler.constant[j];
        for (std::size_t i = 0; i < train.n_rows(); ++i)
            x(i, j) = constant ? view[i] - med : (view[i] - med) / iqr;
    }
    return x;
}

std::vector<std::size_t> largest_remainder_counts(std::size_t n, const std::vector<double>& props) {
    std::vector<std::size_t> counts(props.size());
    std::vector<double> fracs(props.size());
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < props.size(); ++i) {
        double exact = static_cast<double>(n) * props[i];
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        fracs[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(props.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fracs[a] > fracs[b]; });
    for (std::size_t i = 0; assigned < n; ++i) {
        ++counts[order[i % order.size()]];
        ++assigned;
    }
    return counts;
}

std::size_t sample_discrete(const std::vector<double>& w, Rng& rng) {
    double u = rng.uniform();
    double acc = 0.0;
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) continue;
        last = i;
        any = true;
        acc += w[i];
        if (u < acc) return i;
    }
    if (!any) throw DegenerateInput("discrete distribution has no mass");
    return last;
}

std::vector<double> class_targets(const GeneratorBase& base, Proportions proportions) {
    if (proportions == Proportions::MatchReal) return base.class_proportions;
    return std::vector<double>(base.classes.size(), 1.0 / static_cast<double>(base.classes.size()));
}

Table assemble_samples(const GeneratorBase& base, const Matrix& numerics_scaled,
                       const std::vector<std::vector<std::int32_t>>& cat_codes,
                       const std::vector<std::int32_t>& label_codes) {
    const std::size_t n = numerics_scaled.rows();
    TableBuilder b;
    std::size_t num_slot = 0, cat_slot = 0;
    for (const auto& col : base.schema) {
        if (base.has_label && col.role == ColumnRole::Label) {
            b.add_categorical_coded(col.name, label_codes, base.classes, ColumnRole::Label);
        } else if (col.kind == ColumnKind::Numeric) {
            std::vector<double> values(n);
            double med = base.scaler.median[num_slot];
            double iqr = base.scaler.iqr[num_slot];
            bool constant = base.scaler.constant[num_slot];
            for (std::size_t i = 0; i < n; ++i) {
                double v = numerics_scaled(i, num_slot);
                values[i] = constant ? v + med : v * iqr + med;
            }
            b.add_numeric(col.name, std::move(values), ColumnRole::Feature);
            ++num_slot;
        } else {
            b.add_categorical_coded(col.name, cat_codes[cat_slot], base.cat_dictionaries[cat_slot],
                                    ColumnRole::Feature);
            ++cat_slot;
        }
    }
    return std::move(b).build();
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian mixture sampler

namespace {

struct EmState {
    std::vector<double> weights;
    std::vector<std::vector<double>> means;
    std::vector<Matrix> covs;
};

double log_gaussian_quad(const Matrix& chol, std::span<const double> diff) {
    std::vector<double> d(diff.begin(), diff.end());
    std::vector<double> v = cholesky_solve(chol, d);
    double q = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) q += d[i] * v[i];
    return q;
}

std::vector<GmmComponent> em_fit(const Matrix& x, std::size_t k_eff, double ridge_scale, Rng& rng) {
    const std::size_t m = x.rows();
    const std::size_t p = x.cols();
    constexpr double kTwoPiLog = 1.8378770664093453;  // log(2*pi)

    Matrix s_class(p, p);
    if (m >= 2) s_class = sample_covariance(x);
    double trace = 0.0;
    for (std::size_t j = 0; j < p; ++j) trace += s_class(j, j);
    double ridge = std::max(ridge_scale * trace / static_cast<double>(p), 1e-12);

    EmState st;
    st.weights.assign(k_eff, 1.0 / static_cast<double>(k_eff));
    std::vector<std::size_t> rows(m);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    rng.shuffle(rows);
    for (std::size_t c = 0; c < k_eff; ++c) {
        st.means.emplace_back(x.row(rows[c]), x.row(rows[c]) + p);
        Matrix cov = s_class;
        for (std::size_t j = 0; j < p; ++j) cov(j, j) += ridge;
        st.covs.push_back(std::move(cov));
    }

    Matrix resp(m, k_eff);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t iter = 0; iter < 200 && k_eff > 1; ++iter) {
        // E-step via Cholesky factors of the current covariances.
        std::vector<Matrix> chols;
        std::vector<double> logdets;
        for (std::size_t c = 0; c < k_eff; ++c) {
            Matrix l = st.covs[c];
            if (!cholesky(l)) {
                l = st.covs[c];
                for (std::size_t j = 0; j < p; ++j) l(j, j) += ridge * 10.0;
                if (!cholesky(l)) throw DegenerateInput("mixture covariance not positive definite");
            }
            chols.push_back(l);
            logdets.push_back(2.0 * log_diag_sum(chols.back()));
        }
        double ll = 0.0;
        std::vector<double> diff(p), logp(k_eff);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t c = 0; c < k_eff; ++c) {
                for (std::size_t j = 0; j < p; ++j) diff[j] = x(i, j) - st.means[c][j];
                double quad = log_gaussian_quad(chols[c], diff);
                logp[c] = std::log(st.weights[c]) -
                          0.5 * (static_cast<double>(p) * kTwoPiLog + logdets[c] + quad);
            }
            double mx = *std::max_element(logp.begin(), logp.end());
            double sum = 0.0;
            for (double v : logp) sum += std::exp(v - mx);
            double lse = mx + std::log(sum);
            ll += lse;
            for (std::size_t c = 0; c < k_eff; ++c) resp(i, c) = std::exp(logp[c] - lse);
        }
        ll /= static_cast<double>(m);
        if (std::isfinite(prev_ll) && ll - prev_ll < 1e-6) break;
        prev_ll = ll;

        // M-step with the ridge re-applied to every covariance.
        for (std::size_t c = 0; c < k_eff; ++c) {
            double nk = 0.0;
            for (std::size_t i = 0; i < m; ++i) nk += resp(i, c);
            nk = std::max(nk, 1e-10);
            st.weights[c] = nk / static_cast<double>(m);
            std::vector<double> mu(p, 0.0);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < p; ++j) mu[j] += resp(i, c) * x(i, j);
            for (double& v : mu) v /= nk;
            Matrix cov(p, p);
            for (std::size_t i = 0; i < m; ++i) {
                double r = resp(i, c);
                if (r == 0.0) continue;
                for (std::size_t a = 0; a < p; ++a) {
                    double da = x(i, a) - mu[a];
                    for (std::size_t b = a; b < p; ++b)
                        cov(a, b) += r * da * (x(i, b) - mu[b]);
                }
            }
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t b = a; b < p; ++b) {
                    double v = cov(a, b) / nk;
                    cov(a, b) = v;
                    cov(b, a) = v;
                }
            for (std::size_t j = 0; j < p; ++j) cov(j, j) += ridge;
            st.means[c] = std::move(mu);
            st.covs[c] = std::move(cov);
        }
    }

    if (k_eff == 1) {
        // Single component: closed form, no EM needed.
        std::vector<double> mu(p, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < p; ++j) mu[j] += x(i, j);
        for (double& v : mu) v /= static_cast<double>(m);
        Matrix cov = s_class;
        for (std::size_t j = 0; j < p; ++j) cov(j, j) += ridge;
        st.means[0] = std::move(mu);
        st.covs[0] = std::move(cov);
    }

    std::vector<GmmComponent> out;
    for (std::size_t c = 0; c < k_eff; ++c) {
        GmmComponent comp;
        comp.weight = st.weights[c];
        comp.mean = st.means[c];
        comp.chol = st.covs[c];
        if (!cholesky(comp.chol)) {
            comp.chol = st.covs[c];
            for (std::size_t j = 0; j < p; ++j) comp.chol(j, j) += ridge * 10.0;
            if (!cholesky(comp.chol))
                throw DegenerateInput("mixture covariance not positive definite");
        }
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace

GmmSampler fit_gmm(const Table& train, std::size_t k, double ridge_scale, std::uint64_t seed) {
    if (k == 0) throw DomainError("mixture needs at least one component");
    if (!train.has_label()) throw NoLabelColumn();
    GmmSampler model;
    std::vector<std::int32_t> row_class;
    model.base = make_generator_base(train, row_class);
    model.k = k;
    model.ridge_scale = ridge_scale;

    Matrix scaled = scaled_numeric_features(train, model.base);
    const std::size_t p = scaled.cols();
    std::uint64_t base_seed = derive_seed(seed, "gmm_fit");
    for (std::size_t c = 0; c < model.base.classes.size(); ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < train.n_rows(); ++r)
            if (row_class[r] == static_cast<std::int32_t>(c)) rows.push_back(r);
        Matrix xc(rows.size(), p);
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::copy(scaled.row(rows[i]), scaled.row(rows[i]) + p, xc.row(i));
        std::size_t k_eff = rows.size() >= k + 1 ? k : 1;
        Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(c)));
        GmmClassModel cm;
        cm.components = em_fit(xc, k_eff, ridge_scale, rng);
        model.mixtures.push_back(std::move(cm));
    }
    return model;
}

Table sample_gmm(const GmmSampler& model, std::size_t n, Proportions proportions,
                 std::uint64_t seed) {
    const auto& base = model.base;
    const std::size_t p = base.numeric_feature_names.size();
    auto counts = largest_remainder_counts(n, class_targets(base, proportions));
    Rng rng(derive_seed(seed, "gmm_sample"));

    Matrix numerics(n, p);
    std::vector<std::vector<std::int32_t>> cat_codes(base.cat_feature_names.size(),
                                                     std::vector<std::int32_t>(n));
    std::vector<std::int32_t> label_codes(n);
    std::vector<double> comp_weights;
    std::vector<double> z(p);
    std::size_t row = 0;
    for (std::size_t c = 0; c < base.classes.size(); ++c) {
        const auto& mix = model.mixtures[c];
        comp_weights.clear();
        for (const auto& comp : mix.components) comp_weights.push_back(comp.weight);
        for (std::size_t i = 0; i < counts[c]; ++i, ++row) {
            const auto& comp = mix.components[sample_discrete(comp_weights, rng)];
            for (std::size_t j = 0; j < p; ++j) z[j] = rng.normal();
            double* out = numerics.row(row);
            for (std::size_t j = 0; j < p; ++j) {
                double acc = comp.mean[j];
                const double* lrow = comp.chol.row(j);
                for (std::size_t l = 0; l <= j; ++l) acc += lrow[l] * z[l];
                out[j] = acc;
            }
            for (std::size_t j = 0; j < cat_codes.size(); ++j)
                cat_codes[j][row] =
                    static_cast<std::int32_t>(sample_discrete(base.cat_freqs[c][j], rng));
            label_codes[row] = static_cast<std::int32_t>(c);
        }
    }

    // Interleave the class blocks.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);
    Matrix numerics_shuffled(n, p);
    std::vector<std::vector<std::int32_t>> cats_shuffled(cat_codes.size(),
                                                         std::vector<std::int32_t>(n));
    std::vector<std::int32_t> labels_shuffled(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy(numerics.row(perm[i]), numerics.row(perm[i]) + p, numerics_shuffled.row(i));
        for (std::size_t j = 0; j < cat_codes.size(); ++j)
            cats_shuffled[j][i] = cat_codes[j][perm[i]];
        labels_shuffled[i] = label_codes[perm[i]];
    }
    return assemble_samples(base, numerics_shuffled, cats_shuffled, labels_shuffled);
}

// ---------------------------------------------------------------------------
// MLP and GAN training

Mlp Mlp::init(const std::vector<std::size_t>& sizes, double slope, Rng& rng) {
    if (sizes.size() < 2) throw DomainError("network needs at least input and output layers");
    Mlp net;
    net.leaky_slope = slope;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        Matrix w(sizes[l + 1], sizes[l]);
        double scale = std::sqrt(2.0 / static_cast<double>(std::max<std::size_t>(sizes[l], 1)));
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = scale * rng.normal();
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(sizes[l + 1], 0.0);
    }
    return net;
}

Mlp Mlp::zeros_like(const Mlp& other) {
    Mlp net;
    net.leaky_slope = other.leaky_slope;
    for (const auto& w : other.weights) net.weights.emplace_back(w.rows(), w.cols());
    for (const auto& b : other.biases) net.biases.emplace_back(b.size(), 0.0);
    return net;
}

namespace {

inline double leaky(double v, double slope) { return v > 0.0 ? v : slope * v; }
inline double leaky_grad(double v, double slope) { return v > 0.0 ? 1.0 : slope; }

void add_bias_rows(Matrix& m, const std::vector<double>& b) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] += b[j];
    }
}

}  // namespace

Mlp::Forward Mlp::forward(const Matrix& x) const {
    Forward fw;
    fw.input = x;
    const Matrix* cur = &fw.input;
    Matrix activated;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        Matrix z = matmul_nt(*cur, weights[l]);
        add_bias_rows(z, biases[l]);
        fw.pre.push_back(std::move(z));
        if (l + 1 < weights.size()) {
            // Only pre-activations are kept; backward recomputes the activations.
            const Matrix& pre = fw.pre.back();
            Matrix next(pre.rows(), pre.cols());
            for (std::size_t i = 0; i < pre.rows(); ++i) {
                const double* zr = pre.row(i);
                double* ar = next.row(i);
                for (std::size_t j = 0; j < pre.cols(); ++j) ar[j] = leaky(zr[j], leaky_slope);
            }
            activated = std::move(next);
            cur = &activated;
        }
    }
    return fw;
}

Matrix Mlp::backward(const Forward& fw, const Matrix& d_output, Mlp& grads) const {
    const std::size_t layers = weights.size();
    Matrix d = d_output;  // gradient wrt pre[l] while walking down
    for (std::size_t l = layers; l-- > 0;) {
        // Activation feeding layer l: the input for l == 0, else leaky(pre[l-1]).
        Matrix post;
        const Matrix* post_ptr;
        if (l == 0) {
            post_ptr = &fw.input;
        } else {
            const Matrix& prev = fw.pre[l - 1];
            post = Matrix(prev.rows(), prev.cols());
            for (std::size_t i = 0; i < prev.rows(); ++i) {
                const double* zr = prev.row(i);
                double* ar = post.row(i);
                for (std::size_t j = 0; j < prev.cols(); ++j) ar[j] = leaky(zr[j], leaky_slope);
            }
            post_ptr = &post;
        }
        Matrix gw = matmul_tn(d, *post_ptr);
        for (std::size_t i = 0; i < gw.rows(); ++i)
            kernels::axpy(1.0, gw.row(i), grads.weights[l].row(i), gw.cols());
        for (std::size_t i = 0; i < d.rows(); ++i) {
            const double* dr = d.row(i);
            for (std::size_t j = 0; j < d.cols(); ++j) grads.biases[l][j] += dr[j];
        }
        Matrix d_prev = matmul_nn(d, weights[l]);  // gradient wrt activation below
        if (l > 0) {
            const Matrix& prev = fw.pre[l - 1];
            for (std::size_t i = 0; i < d_prev.rows(); ++i) {
                double* dr = d_prev.row(i);
                const double* zr = prev.row(i);
                for (std::size_t j = 0; j < d_prev.cols(); ++j)
                    dr[j] *= leaky_grad(zr[j], leaky_slope);
            }
        }
        d = std::move(d_prev);
    }
    return d;
}

void Mlp::sgd_step(const Mlp& grads, double step) {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (std::size_t i = 0; i < weights[l].rows(); ++i)
            kernels::axpy(-step, grads.weights[l].row(i), weights[l].row(i), weights[l].cols());
        for (std::size_t j = 0; j < biases[l].size(); ++j)
            biases[l][j] -= step * grads.biases[l][j];
    }
}

void Mlp::clip_weights(double c) {
    for (auto& w : weights)
        for (std::size_t i = 0; i < w.rows(); ++i) {
            double* row = w.row(i);
            for (std::size_t j = 0; j < w.cols(); ++j) row[j] = std::clamp(row[j], -c, c);
        }
    for (auto& b : biases)
        for (double& v : b) v = std::clamp(v, -c, c);
}

void Mlp::zero() {
    for (auto& w : weights) w.fill(0.0);
    for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

double vanilla_gan_risk(std::span<const double> d_real, std::span<const double> d_fake) {
    if (d_real.empty() || d_fake.empty()) throw DegenerateInput("risk of empty samples");
    double a = 0.0, b = 0.0;
    for (double v : d_real) a += std::log(v);
    for (double v : d_fake) b += std::log(1.0 - v);
    return a / static_cast<double>(d_real.size()) + b / static_cast<double>(d_fake.size());
}

namespace {

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }
inline double safe_log(double v) { return std::log(std::max(v, 1e-12)); }

struct FGanOps {
    double (*activation)(double);
    double (*activation_grad)(double);
    double (*conjugate)(double);
    double (*conjugate_grad)(double);
    double t_hi;  // activation output clamped below this bound
};

FGanOps fgan_ops(GanObjective objective);

// Clamp the raw critic output into a range whose activation and conjugate
// stay finite; returns the activation value and its derivative.
inline void fgan_activation(const FGanOps& ops, double v, double& t, double& dt_dv,
                            std::size_t& clamps) {
    double vc = v;
    bool clamped = false;
    if (vc > 700.0) { vc = 700.0; clamped = true; }
    if (vc < -700.0) { vc = -700.0; clamped = true; }
    t = ops.activation(vc);
    dt_dv = ops.activation_grad(vc);
    if (t > ops.t_hi) {
        t = ops.t_hi;
        dt_dv = 0.0;
        clamped = true;
    }
    if (clamped) {
        ++clamps;
        if (vc != v) dt_dv = 0.0;
    }
}

double kl_act(double v) { return v; }
double kl_act_grad(double) { return 1.0; }
double kl_conj(double t) { return std::exp(t - 1.0); }
double kl_conj_grad(double t) { return std::exp(t - 1.0); }
double h2_act(double v) { return 1.0 - std::exp(-v); }
double h2_act_grad(double v) { return std::exp(-v); }
double h2_conj(double t) { return t / (1.0 - t); }
double h2_conj_grad(double t) { return 1.0 / ((1.0 - t) * (1.0 - t)); }

FGanOps fgan_ops(GanObjective objective) {
    if (objective == GanObjective::FGanKL)
        return {kl_act, kl_act_grad, kl_conj, kl_conj_grad, 700.0};
    return {h2_act, h2_act_grad, h2_conj, h2_conj_grad, 1.0 - 1e-9};
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    if (b.cols() == 0) return a;
    Matrix out(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::copy(a.row(i), a.row(i) + a.cols(), out.row(i));
        std::copy(b.row(i), b.row(i) + b.cols(), out.row(i) + a.cols());
    }
    return out;
}

}  // namespace

GanTrainer::GanTrainer(const Table& train, const GanSpec& spec) : spec_(spec) {
    if (spec.noise_dim == 0) throw DomainError("noise dimension must be positive");
    if (spec.batch_size < 2) throw DomainError("batch size must be at least 2");
    if (spec.step_size <= 0.0) throw DomainError("step size must be positive");
    if (spec.critic_steps == 0) throw DomainError("need at least one critic step");
    for (auto h : spec.gen_hidden)
        if (h == 0) throw DomainError("hidden layer width must be positive");
    for (auto h : spec.disc_hidden)
        if (h == 0) throw DomainError("hidden layer width must be positive");

    conditional_ = spec.objective == GanObjective::Conditional;
    std::vector<std::int32_t> row_class;
    base_ = make_generator_base(train, row_class);
    if (conditional_ && !base_.has_label) throw MissingLabels();
    labels_ = std::move(row_class);
    scaled_ = scaled_numeric_features(train, base_);

    const std::size_t p = base_.numeric_feature_names.size();
    const std::size_t c = conditional_ ? base_.classes.size() : 0;
    Rng rng(derive_seed(spec.seed, "gan_init"));
    std::vector<std::size_t> d_sizes{p + c};
    for (auto h : spec.disc_hidden) d_sizes.push_back(h);
    d_sizes.push_back(1);
    disc_ = Mlp::init(d_sizes, spec.leaky_slope, rng);
    std::vector<std::size_t> g_sizes{spec.noise_dim + c};
    for (auto h : spec.gen_hidden) g_sizes.push_back(h);
    g_sizes.push_back(p);
    gen_ = Mlp::init(g_sizes, spec.leaky_slope, rng);
}

GanBatch GanTrainer::make_batch(std::span<const std::size_t> rows, Rng& rng) const {
    const std::size_t m = rows.size();
    const std::size_t p = scaled_.cols();
    GanBatch b;
    b.real = Matrix(m, p);
    for (std::size_t i = 0; i < m; ++i)
        std::copy(scaled_.row(rows[i]), scaled_.row(rows[i]) + p, b.real.row(i));
    if (conditional_) {
        b.cond = Matrix(m, base_.classes.size());
        for (std::size_t i = 0; i < m; ++i)
            b.cond(i, static_cast<std::size_t>(labels_[rows[i]])) = 1.0;
    } else {
        b.cond = Matrix(0, 0);
    }
    b.noise = Matrix(m, spec_.noise_dim);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < spec_.noise_dim; ++j) b.noise(i, j) = rng.normal();
    if (spec_.objective == GanObjective::WassersteinGP) {
        b.eps.resize(m);
        for (double& e : b.eps) e = rng.uniform();
    }
    return b;
}

double GanTrainer::discriminator_pass(const GanBatch& b, Mlp& d_grads, std::size_t& clamps) const {
    const std::size_t m = b.real.rows();
    const std::size_t p = b.real.cols();
    d_grads = Mlp::zeros_like(disc_);

    Mlp::Forward gf = gen_.forward(hstack(b.noise, b.cond));
    const Matrix& fake = gf.output();

    Mlp::Forward fr = disc_.forward(hstack(b.real, b.cond));
    Mlp::Forward ff = disc_.forward(hstack(fake, b.cond));

    const double md = static_cast<double>(m);
    Matrix dvr(m, 1), dvf(m, 1);
    double loss = 0.0;

    switch (spec_.objective) {
        case GanObjective::Vanilla:
        case GanObjective::Conditional: {
            for (std::size_t i = 0; i < m; ++i) {
                double qr = sigmoid(fr.output()(i, 0));
                double qf = sigmoid(ff.output()(i, 0));
                loss += -safe_log(qr) - safe_log(1.0 - qf);
                dvr(i, 0) = -(1.0 - qr) / md;
                dvf(i, 0) = qf / md;
            }
            loss /= md;
            break;
        }
        case GanObjective::Wasserstein:
        case GanObjective::WassersteinGP: {
            for (std::size_t i = 0; i < m; ++i) {
                loss += (ff.output()(i, 0) - fr.output()(i, 0)) / md;
                dvr(i, 0) = -1.0 / md;
                dvf(i, 0) = 1.0 / md;
            }
            break;
        }
        case GanObjective::FGanKL:
        case GanObjective::FGanSquaredHellinger: {
            FGanOps ops = fgan_ops(spec_.objective);
            for (std::size_t i = 0; i < m; ++i) {
                double tr, dtr, tf, dtf;
                fgan_activation(ops, fr.output()(i, 0), tr, dtr, clamps);
                fgan_activation(ops, ff.output()(i, 0), tf, dtf, clamps);
                loss += (-tr + ops.conjugate(tf)) / md;
                dvr(i, 0) = -dtr / md;
                dvf(i, 0) = ops.conjugate_grad(tf) * dtf / md;
            }
            break;
        }
    }

    disc_.backward(fr, dvr, d_grads);
    disc_.backward(ff, dvf, d_grads);

    if (spec_.objective == GanObjective::WassersteinGP) {
        if (b.eps.size() != m) throw DomainError("gradient penalty needs interpolation weights");
        Matrix xhat(m, p);
        for (std::size_t i = 0; i < m; ++i) {
            double e = b.eps[i];
            const double* xr = b.real.row(i);
            const double* xf = fake.row(i);
            double* xo = xhat.row(i);
            for (std::size_t j = 0; j < p; ++j) xo[j] = e * xr[j] + (1.0 - e) * xf[j];
        }
        Mlp::Forward fh = disc_.forward(hstack(xhat, b.cond));
        const std::size_t layers = disc_.n_layers();
        double penalty = 0.0;
        std::vector<std::vector<double>> t(layers);
        for (std::size_t i = 0; i < m; ++i) {
            // Input gradient of the critic at sample i, layer by layer.
            std::vector<double> d{1.0};
            for (std::size_t l = layers; l-- > 0;) {
                t[l] = d;
                const Matrix& w = disc_.weights[l];
                std::vector<double> d_prev(w.cols(), 0.0);
                for (std::size_t r = 0; r < w.rows(); ++r)
                    kernels::axpy(d[r], w.row(r), d_prev.data(), w.cols());
                if (l > 0) {
                    const double* zr = fh.pre[l - 1].row(i);
                    for (std::size_t j = 0; j < d_prev.size(); ++j)
                        d_prev[j] *= leaky_grad(zr[j], disc_.leaky_slope);
                }
                d = std::move(d_prev);
            }
            double norm2 = kernels::dot(d.data(), d.data(), d.size());
            double norm = std::sqrt(norm2);
            penalty += (norm - 1.0) * (norm - 1.0);
            if (norm == 0.0) continue;
            double factor = 2.0 * (norm - 1.0) / norm;
            const double coef = spec_.gp_weight / md;
            // Forward re-trace: accumulate d(penalty)/dW layer by layer.
            std::vector<double> c(d.size());
            for (std::size_t j = 0; j < d.size(); ++j) c[j] = factor * d[j];
            for (std::size_t l = 0; l < layers; ++l) {
                Matrix& gw = d_grads.weights[l];
                for (std::size_t r = 0; r < gw.rows(); ++r)
                    kernels::axpy(coef * t[l][r], c.data(), gw.row(r), gw.cols());
                if (l + 1 < layers) {
                    const Matrix& w = disc_.weights[l];
                    std::vector<double> c_next(w.rows());
                    for (std::size_t r = 0; r < w.rows(); ++r)
                        c_next[r] = kernels::dot(w.row(r), c.data(), w.cols());
                    const double* zr = fh.pre[l].row(i);
                    for (std::size_t r = 0; r < c_next.size(); ++r)
                        c_next[r] *= leaky_grad(zr[r], disc_.leaky_slope);
                    c = std::move(c_next);
                }
            }
        }
        loss += spec_.gp_weight * penalty / md;
    }
    return loss;
}

double GanTrainer::generator_pass(const GanBatch& b, Mlp& g_grads, std::size_t& clamps) const {
    const std::size_t m = b.real.rows();
    const std::size_t p = b.real.cols();
    g_grads = Mlp::zeros_like(gen_);

    Mlp::Forward gf = gen_.forward(hstack(b.noise, b.cond));
    Mlp::Forward ff = disc_.forward(hstack(gf.output(), b.cond));

    const double md = static_cast<double>(m);
    Matrix dvf(m, 1);
    double loss = 0.0;
    switch (spec_.objective) {
        case GanObjective::Vanilla:
        case GanObjective::Conditional: {
            for (std::size_t i = 0; i < m; ++i) {
                double qf = sigmoid(ff.output()(i, 0));
                if (spec_.saturating_generator) {
                    loss += safe_log(1.0 - qf) / md;
                    dvf(i, 0) = -qf / md;
                } else {
                    loss += -safe_log(qf) / md;
                    dvf(i, 0) = -(1.0 - qf) / md;
                }
            }
            break;
        }
        case GanObjective::Wasserstein:
        case GanObjective::WassersteinGP: {
            for (std::size_t i = 0; i < m; ++i) {
                loss += -ff.output()(i, 0) / md;
                dvf(i, 0) = -1.0 / md;
            }
            break;
        }
        case GanObjective::FGanKL:
        case GanObjective::FGanSquaredHellinger: {
            FGanOps ops = fgan_ops(spec_.objective);
            for (std::size_t i = 0; i < m; ++i) {
                double tf, dtf;
                fgan_activation(ops, ff.output()(i, 0), tf, dtf, clamps);
                loss += -ops.conjugate(tf) / md;
                dvf(i, 0) = -ops.conjugate_grad(tf) * dtf / md;
            }
            break;
        }
    }

    Mlp scratch = Mlp::zeros_like(disc_);
    Matrix d_input = disc_.backward(ff, dvf, scratch);
    Matrix d_fake(m, p);
    for (std::size_t i = 0; i < m; ++i)
        std::copy(d_input.row(i), d_input.row(i) + p, d_fake.row(i));
    gen_.backward(gf, d_fake, g_grads);
    return loss;
}

TrainTrace GanTrainer::run() {
    TrainTrace trace;
    trace.spec = spec_;
    trace.n_rows = scaled_.rows();
    trace.n_numeric_features = scaled_.cols();

    const std::size_t n = scaled_.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t order_seed = derive_seed(spec_.seed, "gan_order");
    std::uint64_t batch_seed = derive_seed(spec_.seed, "gan_batch");

    std::size_t global_step = 0;
    Mlp d_grads, g_grads;
    for (std::size_t epoch = 0; epoch < spec_.epochs; ++epoch) {
        Rng order_rng(derive_seed(order_seed, static_cast<std::uint64_t>(epoch)));
        order_rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += spec_.batch_size) {
            std::size_t stop = std::min(n, start + spec_.batch_size);
            std::span<const std::size_t> rows(order.data() + start, stop - start);
            Rng rng(derive_seed(batch_seed, static_cast<std::uint64_t>(global_step)));

            double d_loss = 0.0;
            GanBatch batch = make_batch(rows, rng);
            for (std::size_t cs = 0; cs < spec_.critic_steps; ++cs) {
                if (cs > 0) {
                    for (std::size_t i = 0; i < batch.noise.rows(); ++i)
                        for (std::size_t j = 0; j < batch.noise.cols(); ++j)
                            batch.noise(i, j) = rng.normal();
                    for (double& e : batch.eps) e = rng.uniform();
                }
                d_loss = discriminator_pass(batch, d_grads, trace.domain_clamps);
                if (!std::isfinite(d_loss))
                    throw GanDiverged("discriminator loss diverged at step " +
                                          std::to_string(global_step),
                                      trace);
                disc_.sgd_step(d_grads, spec_.step_size);
                if (spec_.objective == GanObjective::Wasserstein)
                    disc_.clip_weights(spec_.clip);
            }

            for (std::size_t i = 0; i < batch.noise.rows(); ++i)
                for (std::size_t j = 0; j < batch.noise.cols(); ++j)
                    batch.noise(i, j) = rng.normal();
            double g_loss = generator_pass(batch, g_grads, trace.domain_clamps);
            if (!std::isfinite(g_loss))
                throw GanDiverged("generator loss diverged at step " + std::to_string(global_step),
                                  trace);
            gen_.sgd_step(g_grads, spec_.step_size);

            trace.steps.push_back({global_step, epoch, d_loss, g_loss});
            ++global_step;
        }
    }

    for (std::size_t epoch = 0; epoch < spec_.epochs; ++epoch) {
        EpochSummary s{epoch, 0.0, 0.0};
        std::size_t count = 0;
        for (const auto& st : trace.steps)
            if (st.epoch == epoch) {
                s.d_loss_mean += st.d_loss;
                s.g_loss_mean += st.g_loss;
                ++count;
            }
        if (count) {
            s.d_loss_mean /= static_cast<double>(count);
            s.g_loss_mean /= static_cast<double>(count);
        }
        trace.epochs.push_back(s);
    }
    return trace;
}

GanModel GanTrainer::finish() const { return GanModel{base_, spec_, gen_}; }

std::pair<GanModel, TrainTrace> train_gan(const Table& train, const GanSpec& spec) {
    GanTrainer trainer(train, spec);
    TrainTrace trace = trainer.run();
    return {trainer.finish(), std::move(trace)};
}

namespace {

Table sample_gan_codes(const GanModel& model, const std::vector<std::int32_t>& label_codes,
                       Rng& rng) {
    const auto& base = model.base;
    const std::size_t n = label_codes.size();
    const std::size_t p = base.numeric_feature_names.size();
    const bool conditional = model.spec.objective == GanObjective::Conditional;

    Matrix noise(n, model.spec.noise_dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < model.spec.noise_dim; ++j) noise(i, j) = rng.normal();
    Matrix cond(0, 0);
    if (conditional) {
        cond = Matrix(n, base.classes.size());
        for (std::size_t i = 0; i < n; ++i)
            cond(i, static_cast<std::size_t>(label_codes[i])) = 1.0;
    }
    Matrix in = cond.cols() ? Matrix(n, model.spec.noise_dim + base.classes.size()) : noise;
    if (cond.cols()) {
        for (std::size_t i = 0; i < n; ++i) {
            std::copy(noise.row(i), noise.row(i) + model.spec.noise_dim, in.row(i));
            std::copy(cond.row(i), cond.row(i) + base.classes.size(),
                      in.row(i) + model.spec.noise_dim);
        }
    }
    Matrix numerics = model.generator.forward(in).output();
    if (numerics.cols() != p) throw ShapeMismatch("generator output width mismatch");

    std::vector<std::vector<std::int32_t>> cat_codes(base.cat_feature_names.size(),
                                                     std::vector<std::int32_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        auto c = static_cast<std::size_t>(label_codes[i]);
        for (std::size_t j = 0; j < cat_codes.size(); ++j)
            cat_codes[j][i] = static_cast<std::int32_t>(sample_discrete(base.cat_freqs[c][j], rng));
    }
    return assemble_samples(base, numerics, cat_codes, label_codes);
}

}  // namespace

Table sample_gan(const GanModel& model, std::size_t n, Proportions proportions,
                 std::uint64_t seed) {
    auto counts = largest_remainder_counts(n, class_targets(model.base, proportions));
    std::vector<std::int32_t> labels;
    labels.reserve(n);
    for (std::size_t c = 0; c < counts.size(); ++c)
        labels.insert(labels.end(), counts[c], static_cast<std::int32_t>(c));
    Rng rng(derive_seed(seed, "gan_sample"));
    rng.shuffle(labels);
    return sample_gan_codes(model, labels, rng);
}

Table sample_gan(const GanModel& model, const std::vector<std::string>& labels,
                 std::uint64_t seed) {
    if (!model.base.has_label) throw MissingLabels();
    std::unordered_map<std::string, std::int32_t> index;
    for (std::size_t c = 0; c < model.base.classes.size(); ++c)
        index.emplace(model.base.classes[c], static_cast<std::int32_t>(c));
    std::vector<std::int32_t> codes;
    codes.reserve(labels.size());
    for (const auto& name : labels) {
        auto it = index.find(name);
        if (it == index.end()) throw CategoryMismatch("unknown class '" + name + "'");
        codes.push_back(it->second);
    }
    Rng rng(derive_seed(seed, "gan_sample"));
    return sample_gan_codes(model, codes, rng);
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    out << "step,epoch,d_loss,g_loss\n";
    char buf[64];
    for (const auto& s : trace.steps) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.10g,%.10g\n", s.step, s.epoch, s.d_loss,
                      s.g_loss);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Model serialization

namespace {

constexpr int kModelVersion = 1;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    std::size_t r = rows.size();
    std::size_t c = r ? rows[0].size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    return m;
}

json base_to_json(const GeneratorBase& base) {
    json schema = json::array();
    for (const auto& col : base.schema) {
        schema.push_back({{"name", col.name},
                          {"kind", col.kind == ColumnKind::Numeric ? "numeric" : "categorical"},
                          {"role", col.role == ColumnRole::Label ? "label" : "feature"}});
    }
    return {{"schema", std::move(schema)},
            {"numeric_feature_names", base.numeric_feature_names},
            {"cat_feature_names", base.cat_feature_names},
            {"cat_dictionaries", base.cat_dictionaries},
            {"scaler",
             {{"columns", base.scaler.columns},
              {"median", base.scaler.median},
              {"iqr", base.scaler.iqr},
              {"constant", std::vector<int>(base.scaler.constant.begin(), base.scaler.constant.end())}}},
            {"has_label", base.has_label},
            {"label_name", base.label_name},
            {"classes", base.classes},
            {"class_proportions", base.class_proportions},
            {"cat_freqs", base.cat_freqs}};
}

GeneratorBase base_from_json(const json& j) {
    GeneratorBase base;
    for (const auto& col : j.at("schema")) {
        ColumnSchema cs;
        cs.name = col.at("name").get<std::string>();
        cs.kind = col.at("kind").get<std::string>() == "numeric" ? ColumnKind::Numeric
                                                                 : ColumnKind::Categorical;
        cs.role = col.at("role").get<std::string>() == "label" ? ColumnRole::Label
                                                               : ColumnRole::Feature;
        base.schema.push_back(std::move(cs));
    }
    base.numeric_feature_names = j.at("numeric_feature_names").get<std::vector<std::string>>();
    base.cat_feature_names = j.at("cat_feature_names").get<std::vector<std::string>>();
    base.cat_dictionaries = j.at("cat_dictionaries").get<std::vector<std::vector<std::string>>>();
    const auto& s = j.at("scaler");
    base.scaler.columns = s.at("columns").get<std::vector<std::string>>();
    base.scaler.median = s.at("median").get<std::vector<double>>();
    base.scaler.iqr = s.at("iqr").get<std::vector<double>>();
    for (int v : s.at("constant").get<std::vector<int>>()) base.scaler.constant.push_back(v != 0);
    base.has_label = j.at("has_label").get<bool>();
    base.label_name = j.at("label_name").get<std::string>();
    base.classes = j.at("classes").get<std::vector<std::string>>();
    base.class_proportions = j.at("class_proportions").get<std::vector<double>>();
    base.cat_freqs = j.at("cat_freqs").get<std::vector<std::vector<std::vector<double>>>>();
    return base;
}

const char* objective_name(GanObjective o) {
    switch (o) {
        case GanObjective::Vanilla: return "vanilla";
        case GanObjective::Conditional: return "conditional";
        case GanObjective::Wasserstein: return "wasserstein";
        case GanObjective::WassersteinGP: return "wasserstein_gp";
        case GanObjective::FGanKL: return "fgan_kl";
        case GanObjective::FGanSquaredHellinger: return "fgan_squared_hellinger";
    }
    return "vanilla";
}

GanObjective objective_from_name(const std::string& name) {
    if (name == "vanilla") return GanObjective::Vanilla;
    if (name == "conditional") return GanObjective::Conditional;
    if (name == "wasserstein") return GanObjective::Wasserstein;
    if (name == "wasserstein_gp") return GanObjective::WassersteinGP;
    if (name == "fgan_kl") return GanObjective::FGanKL;
    if (name == "fgan_squared_hellinger") return GanObjective::FGanSquaredHellinger;
    throw Unsupported("objective '" + name + "'");
}

json spec_to_json(const GanSpec& s) {
    return {{"objective", objective_name(s.objective)},
            {"noise_dim", s.noise_dim},
            {"gen_hidden", s.gen_hidden},
            {"disc_hidden", s.disc_hidden},
            {"leaky_slope", s.leaky_slope},
            {"epochs", s.epochs},
            {"batch_size", s.batch_size},
            {"step_size", s.step_size},
            {"critic_steps", s.critic_steps},
            {"clip", s.clip},
            {"gp_weight", s.gp_weight},
            {"saturating_generator", s.saturating_generator},
            {"seed", s.seed}};
}

GanSpec spec_from_json(const json& j) {
    GanSpec s;
    s.objective = objective_from_name(j.at("objective").get<std::string>());
    s.noise_dim = j.at("noise_dim").get<std::size_t>();
    s.gen_hidden = j.at("gen_hidden").get<std::vector<std::size_t>>();
    s.disc_hidden = j.at("disc_hidden").get<std::vector<std::size_t>>();
    s.leaky_slope = j.at("leaky_slope").get<double>();
    s.epochs = j.at("epochs").get<std::size_t>();
    s.batch_size = j.at("batch_size").get<std::size_t>();
    s.step_size = j.at("step_size").get<double>();
    s.critic_steps = j.at("critic_steps").get<std::size_t>();
    s.clip = j.at("clip").get<double>();
    s.gp_weight = j.at("gp_weight").get<double>();
    s.saturating_generator = j.at("saturating_generator").get<bool>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
}

json load_model_file(const std::string& path, const char* expected_type) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EmptyFile(path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(0, path, e.what());
    }
    if (j.value("format", "") != "tabeval-model")
        throw Unsupported("not a model file: " + path);
    if (j.value("version", 0) != kModelVersion)
        throw Unsupported("model version " + std::to_string(j.value("version", 0)));
    if (expected_type && j.value("type", "") != expected_type)
        throw Unsupported("model type '" + j.value("type", "") + "', expected '" +
                          expected_type + "'");
    return j;
}

}  // namespace

void save_gmm(const GmmSampler& model, const std::string& path) {
    json mixtures = json::array();
    for (const auto& mix : model.mixtures) {
        json comps = json::array();
        for (const auto& c : mix.components)
            comps.push_back({{"weight", c.weight}, {"mean", c.mean}, {"chol", matrix_to_json(c.chol)}});
        mixtures.push_back({{"components", std::move(comps)}});
    }
    json j{{"format", "tabeval-model"},
           {"version", kModelVersion},
           {"type", "gmm"},
           {"base", base_to_json(model.base)},
           {"k", model.k},
           {"ridge_scale", model.ridge_scale},
           {"mixtures", std::move(mixtures)}};
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

GmmSampler load_gmm(const std::string& path) {
    json j = load_model_file(path, "gmm");
    GmmSampler model;
    model.base = base_from_json(j.at("base"));
    model.k = j.at("k").get<std::size_t>();
    model.ridge_scale = j.at("ridge_scale").get<double>();
    for (const auto& mix : j.at("mixtures")) {
        GmmClassModel cm;
        for (const auto& c : mix.at("components")) {
            GmmComponent comp;
            comp.weight = c.at("weight").get<double>();
            comp.mean = c.at("mean").get<std::vector<double>>();
            comp.chol = matrix_from_json(c.at("chol"));
            cm.components.push_back(std::move(comp));
        }
        model.mixtures.push_back(std::move(cm));
    }
    return model;
}

void save_gan(const GanModel& model, const std::string& path) {
    json layers = json::array();
    for (std::size_t l = 0; l < model.generator.n_layers(); ++l) {
        layers.push_back({{"weights", matrix_to_json(model.generator.weights[l])},
                          {"biases", model.generator.biases[l]}});
    }
    json j{{"format", "tabeval-model"},
           {"version", kModelVersion},
           {"type", "gan"},
           {"base", base_to_json(model.base)},
           {"spec", spec_to_json(model.spec)},
           {"generator", {{"leaky_slope", model.generator.leaky_slope}, {"layers", std::move(layers)}}}};
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

GanModel load_gan(const std::string& path) {
    json j = load_model_file(path, "gan");
    GanModel model;
    model.base = base_from_json(j.at("base"));
    model.spec = spec_from_json(j.at("spec"));
    const auto& g = j.at("generator");
    model.generator.leaky_slope = g.at("leaky_slope").get<double>();
    for (const auto& layer : g.at("layers")) {
        model.generator.weights.push_back(matrix_from_json(layer.at("weights")));
        model.generator.biases.push_back(layer.at("biases").get<std::vector<double>>());
    }
    return model;
}

ModelType peek_model_type(const std::string& path) {
    json j = load_model_file(path, nullptr);
    std::string type = j.value("type", "");
    if (type == "gmm") return ModelType::Gmm;
    if (type == "gan") return ModelType::Gan;
    throw Unsupported("model type '" + type + "'");
}

}  // namespace tabeval
