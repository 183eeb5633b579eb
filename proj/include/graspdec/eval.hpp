#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "graspdec/epoch.hpp"
#include "graspdec/svm.hpp"
#include "graspdec/types.hpp"

namespace graspdec {

struct HoldOut {
    double test_fraction = 0.2;
    bool stratified = true;
};

struct KFold {
    int k = 5;
    bool stratified = true;
};

struct EvaluationConfig {
    std::variant<HoldOut, KFold> scheme = HoldOut{};
    std::uint64_t seed = 0;
    double c_parameter = 1.0;
};

std::string scheme_label(const EvaluationConfig& config);

struct SplitIndices {
    std::vector<int> train;
    std::vector<int> test;
};

// Seeded splits over sample indices. Stratification shuffles within each
// class; folds / test sets are deterministic functions of (labels, seed).
SplitIndices holdout_split(const std::vector<int>& labels, const HoldOut& scheme, std::uint64_t seed);
std::vector<SplitIndices> kfold_splits(const std::vector<int>& labels, const KFold& scheme,
                                       std::uint64_t seed);

// Accuracy (percent of held-out samples) of an SVM trained on precomputed
// feature vectors. Feature extraction is not refitted per split; use
// evaluate_epochs for the leakage-safe pipeline path.
double evaluate_features(const Eigen::Ref<const Matrix>& features, const std::vector<int>& labels,
                         const EvaluationConfig& config);

// Leakage-safe evaluation of one (band, phase) epoch set: per split, CSP is
// fitted on the training trials only, features are derived from that model
// for both partitions, and the SVM is scored on the held-out trials.
double evaluate_epochs(const std::vector<Epoch>& epochs, const EvaluationConfig& config);

// ---------------------------------------------------------------------------
// Accuracy table

struct SubjectAccuracy {
    std::string subject_id;
    std::map<std::pair<Phase, BandName>, double> cells;  // percent
};

// Subjects x (phase, band) percent accuracies plus a mean row. Column order is
// the observation block then the movement block, delta through gamma within
// each. Mean cells are arithmetic means rounded to the nearest integer (half
// away from zero); best_mean_column_per_phase marks the per-phase maximum.
struct AccuracyTable {
    std::vector<std::string> subject_ids;
    std::vector<std::pair<Phase, BandName>> columns;
    Matrix cells;       // [n_subjects x n_columns]
    Vector mean_row;    // rounded integer percentages
    std::array<int, 2> best_mean_column_per_phase{-1, -1};  // [observation, movement]
};

std::vector<std::pair<Phase, BandName>> accuracy_table_columns();

AccuracyTable build_accuracy_table(const std::vector<SubjectAccuracy>& per_subject_results);

std::string accuracy_table_to_csv(const AccuracyTable& table);
std::string accuracy_table_to_markdown(const AccuracyTable& table);

double round_percent(double value);  // nearest integer, half away from zero

}  // namespace graspdec
