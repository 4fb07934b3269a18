#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tabeval/learners.hpp"
#include "tabeval/table.hpp"

namespace tabeval {

/// How well a classifier separates real rows from synthetic ones after the
/// label columns are removed. Scores near chance (AUC 0.5, low F1) mean the
/// synthetic table is hard to tell apart.
struct DistinguishabilityResult {
    std::string classifier;
    double f1_synthetic;  // F1 of the synthetic class on the held-out split
    double roc_auc;       // AUC of the synthetic class
    std::size_t n_real;   // rows per side after size equalization
    std::size_t n_synth;
    std::uint64_t seed;
};

/// Concatenates equal-sized row samples of both tables under a fresh
/// "__source" label, splits 80/20 stratified on it, trains the classifier on
/// the train part and scores the held-out part.
DistinguishabilityResult distinguishability(const Table& real, const Table& synth,
                                            const ClassifierSpec& spec, std::uint64_t seed);

enum class UtilityProtocol {
    TrainRealTestReal,
    TrainRealTestSynth,
    TrainSynthTestReal,
};

const char* utility_protocol_name(UtilityProtocol p);

struct MacroScores {
    double precision;
    double recall;
    double f1;
    double roc_auc;
};

struct UtilityResult {
    UtilityProtocol protocol;
    std::string classifier;
    MacroScores train;  // scored on the protocol's training table
    MacroScores test;   // scored on the protocol's evaluation table
    std::vector<std::string> missing_classes;  // unmatched between model and eval table
};

/// Runs the three train/test protocols with one model per training table:
/// real->real, real->synthetic, synthetic->real.
std::array<UtilityResult, 3> utility_suite(const Table& real_train, const Table& real_test,
                                           const Table& synth, const ClassifierSpec& spec,
                                           std::uint64_t seed);

/// Mean ratio of nearest to second-nearest neighbor distance from each row of
/// `synth` to the rows of `reference`, on shared columns. Numerics are
/// robust-scaled with parameters fitted on the reference; a categorical
/// mismatch adds one to the squared distance. A row whose two nearest
/// neighbors are both exact matches scores 0. Ratios near 1 mean synthetic
/// rows sit in dense regions rather than next to single training rows.
/// exclude_self_pairs skips reference row i for synthetic row i, for
/// self-comparison diagnostics.
double nndr(const Table& synth, const Table& reference, bool exclude_self_pairs = false);

struct PrivacyResult {
    double train_nndr;  // synthetic rows vs the generator's training rows
    double test_nndr;   // synthetic rows vs held-out real rows
    bool overfit_flag;  // |train - test| above the band
    double band;
};

/// Both distance ratios use scaling parameters fitted on real_train so the
/// two numbers are comparable; a large gap flags rows copied from training.
PrivacyResult privacy_report(const Table& synth, const Table& real_train, const Table& real_test,
                             double band = 0.04);

}  // namespace tabeval
