#include "tabeval/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "tabeval/errors.hpp"
#include "tabeval/ingest.hpp"
#include "tabeval/kernels.hpp"
#include "tabeval/rng.hpp"

namespace tabeval {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

double cce_loss(const Matrix& truth_onehot, const Matrix& predicted) {
    if (truth_onehot.rows() != predicted.rows() || truth_onehot.cols() != predicted.cols())
        throw ShapeMismatch("truth and prediction matrices differ in shape");
    if (truth_onehot.rows() == 0) throw ShapeMismatch("loss of zero rows");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth_onehot.rows(); ++i) {
        const double* y = truth_onehot.row(i);
        const double* q = predicted.row(i);
        for (std::size_t c = 0; c < truth_onehot.cols(); ++c)
            if (y[c] > 0.0) acc += y[c] * std::log2(q[c]);
    }
    return acc / static_cast<double>(truth_onehot.rows());
}

double bce_loss(std::span<const double> truth, std::span<const double> predicted) {
    if (truth.size() != predicted.size())
        throw ShapeMismatch("truth and prediction vectors differ in length");
    if (truth.empty()) throw ShapeMismatch("loss of zero rows");
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double y = truth[i];
        if (y > 0.0) acc += y * std::log2(predicted[i]);
        if (y < 1.0) acc += (1.0 - y) * std::log2(1.0 - predicted[i]);
    }
    return acc / static_cast<double>(truth.size());
}

FeatureSpace FeatureSpace::from(const Table& train) {
    FeatureSpace s;
    for (std::size_t c = 0; c < train.n_cols(); ++c) {
        if (train.schema()[c].role != ColumnRole::Feature) continue;
        if (train.kind(c) == ColumnKind::Numeric) {
            s.numeric_names_.push_back(train.schema()[c].name);
        } else {
            s.cat_names_.push_back(train.schema()[c].name);
            s.dictionaries_.push_back(train.dictionary(c));
        }
    }
    return s;
}

FeatureSpace::Aligned FeatureSpace::align(const Table& t) const {
    Aligned a;
    a.numeric = Matrix(t.n_rows(), numeric_names_.size());
    for (std::size_t j = 0; j < numeric_names_.size(); ++j) {
        auto col = t.find_column(numeric_names_[j]);
        if (!col || t.kind(*col) != ColumnKind::Numeric)
            throw SchemaMismatch("numeric feature column '" + numeric_names_[j] + "' missing");
        auto view = t.numeric_column(*col);
        for (std::size_t i = 0; i < t.n_rows(); ++i) a.numeric(i, j) = view[i];
    }
    for (std::size_t j = 0; j < cat_names_.size(); ++j) {
        auto col = t.find_column(cat_names_[j]);
        if (!col || t.kind(*col) != ColumnKind::Categorical)
            throw SchemaMismatch("categorical feature column '" + cat_names_[j] + "' missing");
        std::unordered_map<std::string, std::int32_t> index;
        for (std::size_t i = 0; i < dictionaries_[j].size(); ++i)
            index.emplace(dictionaries_[j][i], static_cast<std::int32_t>(i));
        const auto& dict = t.dictionary(*col);
        std::vector<std::int32_t> remap(dict.size());
        for (std::size_t i = 0; i < dict.size(); ++i) {
            auto it = index.find(dict[i]);
            remap[i] = it == index.end() ? -1 : it->second;
        }
        std::vector<std::int32_t> codes;
        codes.reserve(t.n_rows());
        for (auto c : t.codes(*col)) codes.push_back(remap[static_cast<std::size_t>(c)]);
        a.categorical.push_back(std::move(codes));
    }
    return a;
}

std::size_t FeatureSpace::one_hot_width() const {
    std::size_t w = numeric_names_.size();
    for (const auto& d : dictionaries_) w += d.size();
    return w;
}

Matrix FeatureSpace::one_hot(const Table& t) const {
    Aligned a = align(t);
    Matrix x(t.n_rows(), one_hot_width());
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        double* row = x.row(i);
        for (std::size_t j = 0; j < numeric_names_.size(); ++j) row[j] = a.numeric(i, j);
        std::size_t offset = numeric_names_.size();
        for (std::size_t j = 0; j < cat_names_.size(); ++j) {
            std::int32_t code = a.categorical[j][i];
            if (code >= 0) row[offset + static_cast<std::size_t>(code)] = 1.0;
            offset += dictionaries_[j].size();
        }
    }
    return x;
}

namespace {

void softmax_rows(Matrix& logits) {
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double* row = logits.row(i);
        double mx = row[0];
        for (std::size_t c = 1; c < logits.cols(); ++c) mx = std::max(mx, row[c]);
        double sum = 0.0;
        for (std::size_t c = 0; c < logits.cols(); ++c) {
            row[c] = std::exp(row[c] - mx);
            sum += row[c];
        }
        for (std::size_t c = 0; c < logits.cols(); ++c) row[c] /= sum;
    }
}

Matrix logistic_probs(const Matrix& x, const Matrix& w, const std::vector<double>& b) {
    Matrix logits = matmul_nt(x, w);
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        double* row = logits.row(i);
        for (std::size_t c = 0; c < logits.cols(); ++c) row[c] += b[c];
    }
    softmax_rows(logits);
    return logits;
}

}  // namespace

double LogisticModel::loss_and_gradients(const Matrix& x, const std::vector<std::int32_t>& y,
                                         Matrix& grad_w, std::vector<double>& grad_b) const {
    const std::size_t n = x.rows();
    const std::size_t c_count = weights.rows();
    Matrix q = logistic_probs(x, weights, biases);

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        loss -= std::log2(std::max(q(i, static_cast<std::size_t>(y[i])), 1e-300));
    loss /= static_cast<double>(n);
    for (std::size_t c = 0; c < c_count; ++c)
        loss += 0.5 * l2 * kernels::dot(weights.row(c), weights.row(c), weights.cols());

    // dZ = (Q - Y) / (n ln2); reuse q in place.
    const double scale = 1.0 / (static_cast<double>(n) * kLn2);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = q.row(i);
        row[static_cast<std::size_t>(y[i])] -= 1.0;
        for (std::size_t c = 0; c < c_count; ++c) row[c] *= scale;
    }
    grad_w = matmul_tn(q, x);
    for (std::size_t c = 0; c < c_count; ++c)
        kernels::axpy(l2, weights.row(c), grad_w.row(c), weights.cols());
    grad_b.assign(c_count, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = q.row(i);
        for (std::size_t c = 0; c < c_count; ++c) grad_b[c] += row[c];
    }
    return loss;
}

Matrix LogisticModel::predict_proba(const Table& t) const {
    Matrix x = space.one_hot(t);
    return logistic_probs(x, weights, biases);
}

LogisticModel train_logistic(const Table& train, const LogisticHyperparams& hp) {
    std::size_t label = train.label_index();
    if (train.kind(label) != ColumnKind::Categorical)
        throw SchemaMismatch("label column must be categorical");
    if (train.n_rows() == 0) throw DegenerateInput("cannot train on an empty table");

    LogisticModel m;
    m.space = FeatureSpace::from(train);
    m.classes_ = train.dictionary(label);
    m.l2 = hp.l2;
    m.weights = Matrix(m.classes_.size(), m.space.one_hot_width());
    m.biases.assign(m.classes_.size(), 0.0);

    Matrix x = m.space.one_hot(train);
    auto codes = train.codes(label);
    std::vector<std::int32_t> y(codes.begin(), codes.end());

    Matrix grad_w;
    std::vector<double> grad_b;
    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        double loss = m.loss_and_gradients(x, y, grad_w, grad_b);
        if (!std::isfinite(loss)) throw NonFiniteLoss("logistic loss at epoch " + std::to_string(epoch));
        for (std::size_t c = 0; c < m.weights.rows(); ++c)
            kernels::axpy(-hp.learning_rate, grad_w.row(c), m.weights.row(c), m.weights.cols());
        for (std::size_t c = 0; c < m.biases.size(); ++c)
            m.biases[c] -= hp.learning_rate * grad_b[c];
    }
    return m;
}

namespace {

struct TreeBuilder {
    const FeatureSpace& space;
    const FeatureSpace::Aligned& data;  // training rows
    std::span<const std::int32_t> labels;
    std::size_t n_classes;
    const ForestHyperparams& hp;
    std::size_t features_per_split;
    std::vector<TreeNode> nodes;
    Rng& rng;

    double gini(const std::vector<double>& counts, double n) const {
        double g = 1.0;
        for (double c : counts) g -= (c / n) * (c / n);
        return g;
    }

    std::size_t make_leaf(const std::vector<double>& counts, double n) {
        TreeNode node;
        node.leaf = true;
        node.class_probs.resize(n_classes);
        for (std::size_t c = 0; c < n_classes; ++c) node.class_probs[c] = counts[c] / n;
        nodes.push_back(std::move(node));
        return nodes.size() - 1;
    }

    std::size_t build(std::vector<std::size_t>& idx, std::size_t depth) {
        const double n = static_cast<double>(idx.size());
        std::vector<double> counts(n_classes, 0.0);
        for (std::size_t r : idx) counts[static_cast<std::size_t>(labels[r])] += 1.0;
        bool pure = false;
        for (double c : counts)
            if (c == n) { pure = true; break; }
        if (pure || depth >= hp.max_depth || idx.size() < 2 * hp.min_leaf)
            return make_leaf(counts, n);

        // Random feature subset, numerics first then categoricals.
        std::vector<std::size_t> features(space.n_features());
        std::iota(features.begin(), features.end(), std::size_t{0});
        std::size_t m = std::min(features_per_split, features.size());
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t j = i + static_cast<std::size_t>(rng.below(features.size() - i));
            std::swap(features[i], features[j]);
        }

        const double parent_gini = gini(counts, n);
        double best_gain = 1e-12;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        std::int32_t best_category = -1;
        bool best_is_numeric = true;

        for (std::size_t fi = 0; fi < m; ++fi) {
            std::size_t f = features[fi];
            if (f < space.n_numeric()) {
                evaluate_numeric(f, idx, counts, n, parent_gini, best_gain, best_feature,
                                 best_threshold, best_is_numeric);
            } else {
                evaluate_categorical(f, idx, counts, n, parent_gini, best_gain, best_feature,
                                     best_category, best_is_numeric);
            }
        }
        if (best_gain <= 1e-12) return make_leaf(counts, n);

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t r : idx) {
            bool left;
            if (best_is_numeric) {
                left = data.numeric(r, best_feature) < best_threshold;
            } else {
                left = data.categorical[best_feature - space.n_numeric()][r] == best_category;
            }
            (left ? left_idx : right_idx).push_back(r);
        }
        idx.clear();
        idx.shrink_to_fit();

        TreeNode node;
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.category = best_category;
        nodes.push_back(std::move(node));
        std::size_t self = nodes.size() - 1;
        std::size_t left_child = build(left_idx, depth + 1);
        std::size_t right_child = build(right_idx, depth + 1);
        nodes[self].left = left_child;
        nodes[self].right = right_child;
        return self;
    }

    void evaluate_numeric(std::size_t f, const std::vector<std::size_t>& idx,
                          const std::vector<double>& counts, double n, double parent_gini,
                          double& best_gain, std::size_t& best_feature, double& best_threshold,
                          bool& best_is_numeric) {
        std::vector<std::pair<double, std::int32_t>> vals;
        vals.reserve(idx.size());
        for (std::size_t r : idx)
            vals.emplace_back(data.numeric(r, f), labels[r]);
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::vector<std::size_t> boundaries;  // i: split between vals[i-1] and vals[i]
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (vals[i].first != vals[i - 1].first) boundaries.push_back(i);
        if (boundaries.empty()) return;
        std::vector<std::size_t> candidates;
        if (boundaries.size() > 256) {
            std::size_t step = boundaries.size() / 64;
            for (std::size_t i = step - 1; i < boundaries.size(); i += step)
                candidates.push_back(boundaries[i]);
        } else {
            candidates = boundaries;
        }

        std::vector<double> left_counts(n_classes, 0.0);
        std::size_t pos = 0;
        for (std::size_t cut : candidates) {
            for (; pos < cut; ++pos)
                left_counts[static_cast<std::size_t>(vals[pos].second)] += 1.0;
            double nl = static_cast<double>(cut);
            double nr = n - nl;
            if (nl < static_cast<double>(hp.min_leaf) || nr < static_cast<double>(hp.min_leaf))
                continue;
            std::vector<double> right_counts(n_classes);
            for (std::size_t c = 0; c < n_classes; ++c) right_counts[c] = counts[c] - left_counts[c];
            double gain = parent_gini - (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / n;
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = f;
                best_threshold = vals[cut - 1].first + 0.5 * (vals[cut].first - vals[cut - 1].first);
                best_is_numeric = true;
            }
        }
    }

    void evaluate_categorical(std::size_t f, const std::vector<std::size_t>& idx,
                              const std::vector<double>& counts, double n, double parent_gini,
                              double& best_gain, std::size_t& best_feature,
                              std::int32_t& best_category, bool& best_is_numeric) {
        const auto& codes = data.categorical[f - space.n_numeric()];
        std::unordered_map<std::int32_t, std::vector<double>> per_cat;
        for (std::size_t r : idx) {
            auto& cc = per_cat[codes[r]];
            if (cc.empty()) cc.resize(n_classes);
            cc[static_cast<std::size_t>(labels[r])] += 1.0;
        }
        if (per_cat.size() < 2) return;
        // Deterministic candidate order regardless of hash layout.
        std::vector<std::int32_t> cats;
        for (const auto& [cat, _] : per_cat) cats.push_back(cat);
        std::sort(cats.begin(), cats.end());
        for (std::int32_t cat : cats) {
            const auto& left_counts = per_cat[cat];
            double nl = std::accumulate(left_counts.begin(), left_counts.end(), 0.0);
            double nr = n - nl;
            if (nl < static_cast<double>(hp.min_leaf) || nr < static_cast<double>(hp.min_leaf))
                continue;
            std::vector<double> right_counts(n_classes);
            for (std::size_t c = 0; c < n_classes; ++c) right_counts[c] = counts[c] - left_counts[c];
            double gain = parent_gini - (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / n;
            if (gain > best_gain) {
                best_gain = gain;
                best_feature = f;
                best_category = cat;
                best_is_numeric = false;
            }
        }
    }
};

}  // namespace

ForestModel train_forest(const Table& train, const ForestHyperparams& hp) {
    std::size_t label = train.label_index();
    if (train.kind(label) != ColumnKind::Categorical)
        throw SchemaMismatch("label column must be categorical");
    if (train.n_rows() == 0) throw DegenerateInput("cannot train on an empty table");
    if (hp.n_trees == 0) throw DomainError("forest needs at least one tree");

    ForestModel m;
    m.space = FeatureSpace::from(train);
    m.classes_ = train.dictionary(label);
    if (m.space.n_features() == 0) throw DegenerateInput("no feature columns to split on");

    FeatureSpace::Aligned data = m.space.align(train);
    auto codes = train.codes(label);
    std::size_t features_per_split = hp.features_per_split;
    if (features_per_split == 0)
        features_per_split = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m.space.n_features())))));

    const std::size_t n = train.n_rows();
    for (std::size_t t = 0; t < hp.n_trees; ++t) {
        Rng rng(derive_seed(hp.seed, static_cast<std::uint64_t>(t)));
        std::vector<std::size_t> idx;
        idx.reserve(n);
        if (hp.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) idx.push_back(static_cast<std::size_t>(rng.below(n)));
        } else {
            idx.resize(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
        }
        TreeBuilder builder{m.space, data, codes, m.classes_.size(), hp, features_per_split, {}, rng};
        builder.build(idx, 0);
        m.trees.push_back(std::move(builder.nodes));
    }
    return m;
}

Matrix ForestModel::predict_proba(const Table& t) const {
    FeatureSpace::Aligned data = space.align(t);
    Matrix probs(t.n_rows(), classes_.size());
    for (std::size_t i = 0; i < t.n_rows(); ++i) {
        double* out = probs.row(i);
        for (const auto& tree : trees) {
            std::size_t node = 0;  // nodes are appended parent-first, root at 0
            while (!tree[node].leaf) {
                bool left;
                if (tree[node].feature < space.n_numeric()) {
                    left = data.numeric(i, tree[node].feature) < tree[node].threshold;
                } else {
                    left = data.categorical[tree[node].feature - space.n_numeric()][i] ==
                           tree[node].category;
                }
                node = left ? tree[node].left : tree[node].right;
            }
            for (std::size_t c = 0; c < classes_.size(); ++c) out[c] += tree[node].class_probs[c];
        }
        const double k = static_cast<double>(trees.size());
        for (std::size_t c = 0; c < classes_.size(); ++c) out[c] /= k;
    }
    return probs;
}

double roc_auc_rank(std::span<const double> scores, std::span<const std::uint8_t> positives) {
    if (scores.size() != positives.size())
        throw ShapeMismatch("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (auto p : positives) n_pos += p ? 1 : 0;
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DegenerateInput("ROC-AUC needs both classes present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double midrank = 0.5 * static_cast<double>(i + j - 1) + 1.0;  // 1-based
        for (std::size_t t = i; t < j; ++t)
            if (positives[order[t]]) rank_sum_pos += midrank;
        i = j;
    }
    double np = static_cast<double>(n_pos);
    double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsBundle evaluate(const Classifier& model, const Table& test) {
    std::size_t label = test.label_index();
    if (test.kind(label) != ColumnKind::Categorical)
        throw SchemaMismatch("label column must be categorical");
    if (test.n_rows() == 0) throw DegenerateInput("cannot evaluate on an empty table");

    const auto& classes = model.classes();
    const std::size_t c_count = classes.size();
    std::unordered_map<std::string, std::size_t> class_index;
    for (std::size_t c = 0; c < c_count; ++c) class_index.emplace(classes[c], c);

    const auto& dict = test.dictionary(label);
    std::vector<std::int32_t> remap(dict.size());
    MetricsBundle out;
    for (std::size_t i = 0; i < dict.size(); ++i) {
        auto it = class_index.find(dict[i]);
        if (it == class_index.end()) {
            remap[i] = -1;
            out.unknown_classes.push_back(dict[i]);
        } else {
            remap[i] = static_cast<std::int32_t>(it->second);
        }
    }

    const std::size_t n = test.n_rows();
    std::vector<std::int32_t> truth(n);
    auto codes = test.codes(label);
    for (std::size_t i = 0; i < n; ++i) truth[i] = remap[static_cast<std::size_t>(codes[i])];

    Matrix probs = model.predict_proba(test);
    std::vector<std::size_t> pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = probs.row(i);
        std::size_t best = 0;
        for (std::size_t c = 1; c < c_count; ++c)
            if (row[c] > row[best]) best = c;
        pred[i] = best;
    }

    std::vector<double> tp(c_count, 0.0), fp(c_count, 0.0), fn(c_count, 0.0);
    std::vector<std::size_t> support(c_count, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (truth[i] >= 0) {
            auto t = static_cast<std::size_t>(truth[i]);
            ++support[t];
            if (pred[i] == t) tp[t] += 1.0;
            else fn[t] += 1.0;
        }
        if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) != pred[i]) fp[pred[i]] += 1.0;
    }

    double sum_p = 0.0, sum_r = 0.0, sum_f = 0.0, sum_auc = 0.0;
    std::size_t scored = 0, auc_scored = 0;
    std::vector<double> scores(n);
    std::vector<std::uint8_t> pos(n);
    for (std::size_t c = 0; c < c_count; ++c) {
        ClassMetrics cm;
        cm.cls = classes[c];
        cm.support = support[c];
        double pdenom = tp[c] + fp[c];
        double rdenom = tp[c] + fn[c];
        cm.precision = pdenom > 0.0 ? tp[c] / pdenom : 0.0;
        cm.recall = rdenom > 0.0 ? tp[c] / rdenom : 0.0;
        cm.f1 = (cm.precision + cm.recall) > 0.0
            ? 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall)
            : 0.0;
        if (support[c] == 0) {
            out.absent_classes.push_back(classes[c]);
        } else {
            sum_p += cm.precision;
            sum_r += cm.recall;
            sum_f += cm.f1;
            ++scored;
            if (support[c] < n) {
                for (std::size_t i = 0; i < n; ++i) {
                    scores[i] = probs(i, c);
                    pos[i] = truth[i] >= 0 && static_cast<std::size_t>(truth[i]) == c ? 1 : 0;
                }
                cm.roc_auc = roc_auc_rank(scores, pos);
                sum_auc += *cm.roc_auc;
                ++auc_scored;
            }
        }
        out.per_class.push_back(std::move(cm));
    }
    if (scored == 0) throw DegenerateInput("no model class present in the evaluation data");
    out.macro_precision = sum_p / static_cast<double>(scored);
    out.macro_recall = sum_r / static_cast<double>(scored);
    out.macro_f1 = sum_f / static_cast<double>(scored);
    out.macro_roc_auc = auc_scored > 0 ? sum_auc / static_cast<double>(auc_scored) : 0.5;
    return out;
}

std::unique_ptr<Classifier> train_classifier(const ClassifierSpec& spec, const Table& train,
                                             std::uint64_t seed) {
    if (spec.kind == ClassifierSpec::Kind::Logistic) {
        return std::make_unique<LogisticModel>(train_logistic(train, spec.logistic));
    }
    ForestHyperparams hp = spec.forest;
    hp.seed = seed;
    return std::make_unique<ForestModel>(train_forest(train, hp));
}

MetricRange metric_range(std::span<const double> fold_values, double band) {
    MetricRange r{0.0, 0.0, true};
    if (fold_values.empty()) return r;
    r.min = *std::min_element(fold_values.begin(), fold_values.end());
    r.max = *std::max_element(fold_values.begin(), fold_values.end());
    r.stable = (r.max - r.min) <= band;
    return r;
}

CrossValidationResult cross_validate(const Table& t, const ClassifierSpec& spec, std::size_t k,
                                     double stability_band, std::uint64_t seed) {
    auto folds = stratified_kfold(t, k, derive_seed(seed, "cv_folds"));
    CrossValidationResult out;
    out.stability_band = stability_band;
    std::vector<double> ps, rs, fs, aucs;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        Table train = t.select_rows(folds[f].train_indices);
        Table val = t.select_rows(folds[f].validation_indices);
        auto model = train_classifier(spec, train, derive_seed(seed, static_cast<std::uint64_t>(f)));
        MetricsBundle m = evaluate(*model, val);
        ps.push_back(m.macro_precision);
        rs.push_back(m.macro_recall);
        fs.push_back(m.macro_f1);
        aucs.push_back(m.macro_roc_auc);
        out.folds.push_back(std::move(m));
    }
    out.precision = metric_range(ps, stability_band);
    out.recall = metric_range(rs, stability_band);
    out.f1 = metric_range(fs, stability_band);
    out.roc_auc = metric_range(aucs, stability_band);
    return out;
}

}  // namespace tabeval
