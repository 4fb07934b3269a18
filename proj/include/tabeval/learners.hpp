#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tabeval/matrix.hpp"
#include "tabeval/table.hpp"

namespace tabeval {

/// Mean categorical cross-entropy in bits, paper form: the value is <= 0 and
/// equals 0 only for a perfectly confident, correct prediction.
double cce_loss(const Matrix& truth_onehot, const Matrix& predicted);

/// Binary case of the above, operating on probabilities of the positive class.
double bce_loss(std::span<const double> truth, std::span<const double> predicted);

/// Captures the training table's feature columns, kinds and dictionaries and
/// aligns any compatible table to that layout by column name. Categories
/// unseen in training map to code -1.
class FeatureSpace {
public:
    static FeatureSpace from(const Table& train);

    struct Aligned {
        Matrix numeric;                                  // n x n_numeric
        std::vector<std::vector<std::int32_t>> categorical;  // per cat column, remapped codes
    };
    Aligned align(const Table& t) const;

    std::size_t n_numeric() const { return numeric_names_.size(); }
    std::size_t n_categorical() const { return cat_names_.size(); }
    std::size_t n_features() const { return n_numeric() + n_categorical(); }
    const std::vector<std::string>& numeric_names() const { return numeric_names_; }
    const std::vector<std::string>& categorical_names() const { return cat_names_; }
    const std::vector<std::string>& dictionary(std::size_t cat_slot) const {
        return dictionaries_[cat_slot];
    }

    /// Numeric columns first, then one block of indicator columns per
    /// categorical feature. Unseen categories encode as an all-zero block.
    Matrix one_hot(const Table& t) const;
    std::size_t one_hot_width() const;

private:
    std::vector<std::string> numeric_names_;
    std::vector<std::string> cat_names_;
    std::vector<std::vector<std::string>> dictionaries_;
};

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual const std::vector<std::string>& classes() const = 0;
    virtual Matrix predict_proba(const Table& t) const = 0;  // n x n_classes
    virtual std::string name() const = 0;
};

struct LogisticHyperparams {
    double learning_rate = 0.5;
    double l2 = 1e-4;
    std::size_t epochs = 200;
};

/// Multinomial logistic regression, zero-initialized, trained by full-batch
/// gradient descent on base-2 cross-entropy plus an L2 penalty on weights.
class LogisticModel : public Classifier {
public:
    const std::vector<std::string>& classes() const override { return classes_; }
    Matrix predict_proba(const Table& t) const override;
    std::string name() const override { return "logistic"; }

    /// Loss and analytic gradients at the current parameters, exposed so the
    /// gradient can be checked against finite differences.
    double loss_and_gradients(const Matrix& x, const std::vector<std::int32_t>& y,
                              Matrix& grad_w, std::vector<double>& grad_b) const;

    FeatureSpace space;
    Matrix weights;               // n_classes x one_hot_width
    std::vector<double> biases;   // n_classes
    double l2 = 0.0;

private:
    friend LogisticModel train_logistic(const Table&, const LogisticHyperparams&);
    std::vector<std::string> classes_;
};

LogisticModel train_logistic(const Table& train, const LogisticHyperparams& hp = {});

struct ForestHyperparams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 16;
    std::size_t min_leaf = 1;
    std::size_t features_per_split = 0;  // 0 means floor(sqrt(n_features))
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

struct TreeNode {
    bool leaf = false;
    std::size_t feature = 0;        // index into FeatureSpace features, numerics first
    double threshold = 0.0;         // numeric split: value < threshold goes left
    std::int32_t category = -1;     // categorical split: code == category goes left
    std::size_t left = 0;
    std::size_t right = 0;
    std::vector<double> class_probs;
};

/// Random forest of CART trees (Gini impurity, bootstrap rows, random feature
/// subsets per split).
class ForestModel : public Classifier {
public:
    const std::vector<std::string>& classes() const override { return classes_; }
    Matrix predict_proba(const Table& t) const override;
    std::string name() const override { return "random_forest"; }

    FeatureSpace space;
    std::vector<std::vector<TreeNode>> trees;

private:
    friend ForestModel train_forest(const Table&, const ForestHyperparams&);
    std::vector<std::string> classes_;
};

ForestModel train_forest(const Table& train, const ForestHyperparams& hp = {});

struct ClassMetrics {
    std::string cls;
    std::size_t support;
    double precision;
    double recall;
    double f1;
    std::optional<double> roc_auc;  // absent when only one truth value occurs
};

struct MetricsBundle {
    double macro_precision;
    double macro_recall;
    double macro_f1;
    double macro_roc_auc;  // over classes where AUC is defined; 0.5 if none
    std::vector<ClassMetrics> per_class;
    std::vector<std::string> absent_classes;  // known to the model, absent from the data
    std::vector<std::string> unknown_classes; // in the data, unknown to the model
};

/// One-vs-rest ROC-AUC by the rank statistic, ties handled with midranks.
double roc_auc_rank(std::span<const double> scores, std::span<const std::uint8_t> positives);

MetricsBundle evaluate(const Classifier& model, const Table& test);

struct ClassifierSpec {
    enum class Kind { Logistic, Forest } kind = Kind::Forest;
    LogisticHyperparams logistic;
    ForestHyperparams forest;
};

std::unique_ptr<Classifier> train_classifier(const ClassifierSpec& spec, const Table& train,
                                             std::uint64_t seed);

struct MetricRange {
    double min;
    double max;
    bool stable;  // max - min <= band
};

struct CrossValidationResult {
    std::vector<MetricsBundle> folds;
    MetricRange precision;
    MetricRange recall;
    MetricRange f1;
    MetricRange roc_auc;
    double stability_band;
};

MetricRange metric_range(std::span<const double> fold_values, double band);

CrossValidationResult cross_validate(const Table& t, const ClassifierSpec& spec, std::size_t k = 10,
                                     double stability_band = 0.04, std::uint64_t seed = 0);

}  // namespace tabeval
