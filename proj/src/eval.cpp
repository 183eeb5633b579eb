#include "graspdec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "graspdec/csp.hpp"
#include "graspdec/errors.hpp"
#include "graspdec/rng.hpp"

namespace graspdec {

namespace {

std::vector<std::vector<int>> indices_by_class(const std::vector<int>& labels, bool stratified) {
    std::vector<std::vector<int>> groups;
    if (stratified) {
        std::vector<int> pos, neg;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            (labels[i] > 0 ? pos : neg).push_back(static_cast<int>(i));
        }
        groups = {std::move(pos), std::move(neg)};
    } else {
        std::vector<int> all(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) all[i] = static_cast<int>(i);
        groups = {std::move(all)};
    }
    return groups;
}

double score_split(const Eigen::Ref<const Matrix>& features, const std::vector<int>& labels,
                   const SplitIndices& split, double c, int* correct, int* total) {
    Matrix x_train(static_cast<Eigen::Index>(split.train.size()), features.cols());
    std::vector<int> y_train;
    y_train.reserve(split.train.size());
    for (std::size_t i = 0; i < split.train.size(); ++i) {
        x_train.row(static_cast<Eigen::Index>(i)) = features.row(split.train[i]);
        y_train.push_back(labels[static_cast<std::size_t>(split.train[i])]);
    }
    SvmModel model = train_svm(x_train, y_train, c);

    int ok = 0;
    for (int idx : split.test) {
        Eigen::Vector4d x = features.row(idx).transpose();
        int predicted = class_sign(predict(model, x));
        if (predicted == labels[static_cast<std::size_t>(idx)]) ++ok;
    }
    *correct += ok;
    *total += static_cast<int>(split.test.size());
    return 100.0 * ok / static_cast<double>(split.test.size());
}

}  // namespace

std::string scheme_label(const EvaluationConfig& config) {
    if (const auto* h = std::get_if<HoldOut>(&config.scheme)) {
        return "holdout(test_fraction=" + std::to_string(h->test_fraction) +
               (h->stratified ? ",stratified" : "") + ")";
    }
    const auto& k = std::get<KFold>(config.scheme);
    return "kfold(k=" + std::to_string(k.k) + (k.stratified ? ",stratified" : "") + ")";
}

SplitIndices holdout_split(const std::vector<int>& labels, const HoldOut& scheme, std::uint64_t seed) {
    if (!(scheme.test_fraction > 0.0) || !(scheme.test_fraction < 1.0)) {
        throw InputError("test_fraction must lie in (0, 1)");
    }
    Rng rng = substream(seed, "split");
    SplitIndices out;
    for (auto& group : indices_by_class(labels, scheme.stratified)) {
        if (group.empty()) continue;
        rng.shuffle(group);
        auto n_test = static_cast<std::size_t>(
            std::llround(scheme.test_fraction * static_cast<double>(group.size())));
        n_test = std::clamp<std::size_t>(n_test, 1, group.size() - 1);
        out.test.insert(out.test.end(), group.begin(), group.begin() + static_cast<long>(n_test));
        out.train.insert(out.train.end(), group.begin() + static_cast<long>(n_test), group.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    if (out.train.empty() || out.test.empty()) throw InputError("hold-out split produced an empty partition");
    return out;
}

std::vector<SplitIndices> kfold_splits(const std::vector<int>& labels, const KFold& scheme,
                                       std::uint64_t seed) {
    if (scheme.k < 2) throw InputError("k-fold requires k >= 2");
    Rng rng = substream(seed, "split");
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(scheme.k));
    for (auto& group : indices_by_class(labels, scheme.stratified)) {
        if (scheme.stratified && !group.empty() &&
            group.size() < static_cast<std::size_t>(scheme.k)) {
            throw InputError("stratified k-fold needs at least k samples per class");
        }
        rng.shuffle(group);
        for (std::size_t i = 0; i < group.size(); ++i) {
            folds[i % folds.size()].push_back(group[i]);
        }
    }
    std::vector<SplitIndices> out;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        SplitIndices split;
        split.test = folds[f];
        for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g == f) continue;
            split.train.insert(split.train.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(split.train.begin(), split.train.end());
        std::sort(split.test.begin(), split.test.end());
        if (split.test.empty()) throw InputError("k-fold split produced an empty fold");
        out.push_back(std::move(split));
    }
    return out;
}

double evaluate_features(const Eigen::Ref<const Matrix>& features, const std::vector<int>& labels,
                         const EvaluationConfig& config) {
    if (features.rows() != static_cast<Eigen::Index>(labels.size())) {
        throw InputError("feature/label count mismatch");
    }
    int correct = 0, total = 0;
    if (const auto* h = std::get_if<HoldOut>(&config.scheme)) {
        score_split(features, labels, holdout_split(labels, *h, config.seed), config.c_parameter,
                    &correct, &total);
    } else {
        for (const auto& split : kfold_splits(labels, std::get<KFold>(config.scheme), config.seed)) {
            score_split(features, labels, split, config.c_parameter, &correct, &total);
        }
    }
    return 100.0 * correct / static_cast<double>(total);
}

namespace {

double evaluate_epoch_split(const std::vector<Epoch>& epochs, const SplitIndices& split, double c,
                            int* correct, int* total) {
    std::vector<Epoch> power_train, precision_train;
    for (int idx : split.train) {
        const Epoch& ep = epochs[static_cast<std::size_t>(idx)];
        (ep.grasp_class == GraspClass::Power ? power_train : precision_train).push_back(ep);
    }
    CspModel csp = fit_csp(power_train, precision_train);

    std::vector<FeatureVector> train_features;
    train_features.reserve(split.train.size());
    for (int idx : split.train) {
        train_features.push_back(log_variance_features(csp, epochs[static_cast<std::size_t>(idx)]));
    }
    SvmModel svm = train_svm(train_features, c);

    int ok = 0;
    for (int idx : split.test) {
        const Epoch& ep = epochs[static_cast<std::size_t>(idx)];
        FeatureVector fv = log_variance_features(csp, ep);
        if (predict(svm, fv.values) == ep.grasp_class) ++ok;
    }
    *correct += ok;
    *total += static_cast<int>(split.test.size());
    return 100.0 * ok / static_cast<double>(split.test.size());
}

}  // namespace

double evaluate_epochs(const std::vector<Epoch>& epochs, const EvaluationConfig& config) {
    if (epochs.size() < 4) throw InputError("need at least 4 epochs to evaluate");
    std::vector<int> labels;
    labels.reserve(epochs.size());
    for (const auto& ep : epochs) labels.push_back(class_sign(ep.grasp_class));

    int correct = 0, total = 0;
    if (const auto* h = std::get_if<HoldOut>(&config.scheme)) {
        evaluate_epoch_split(epochs, holdout_split(labels, *h, config.seed), config.c_parameter,
                             &correct, &total);
    } else {
        for (const auto& split : kfold_splits(labels, std::get<KFold>(config.scheme), config.seed)) {
            evaluate_epoch_split(epochs, split, config.c_parameter, &correct, &total);
        }
    }
    return 100.0 * correct / static_cast<double>(total);
}

// ---------------------------------------------------------------------------

double round_percent(double value) {
    return value >= 0.0 ? std::floor(value + 0.5) : std::ceil(value - 0.5);
}

std::vector<std::pair<Phase, BandName>> accuracy_table_columns() {
    std::vector<std::pair<Phase, BandName>> cols;
    for (Phase phase : {Phase::Observation, Phase::Movement}) {
        for (const auto& band : standard_bands()) cols.emplace_back(phase, band.name);
    }
    return cols;
}

AccuracyTable build_accuracy_table(const std::vector<SubjectAccuracy>& per_subject_results) {
    if (per_subject_results.empty()) throw InputError("accuracy table needs at least one subject");

    std::set<std::pair<Phase, BandName>> keys;
    for (const auto& [key, value] : per_subject_results.front().cells) keys.insert(key);
    for (const auto& subject : per_subject_results) {
        std::set<std::pair<Phase, BandName>> own;
        for (const auto& [key, value] : subject.cells) own.insert(key);
        if (own != keys) {
            throw InputError("subject '" + subject.subject_id + "' covers different (band, phase) columns");
        }
    }

    AccuracyTable table;
    for (const auto& col : accuracy_table_columns()) {
        if (keys.count(col)) table.columns.push_back(col);
    }
    if (table.columns.size() != keys.size()) {
        throw InputError("accuracy cells contain an unknown (band, phase) column");
    }

    table.cells.resize(static_cast<Eigen::Index>(per_subject_results.size()),
                       static_cast<Eigen::Index>(table.columns.size()));
    for (std::size_t s = 0; s < per_subject_results.size(); ++s) {
        table.subject_ids.push_back(per_subject_results[s].subject_id);
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            double v = per_subject_results[s].cells.at(table.columns[c]);
            if (!(v >= 0.0 && v <= 100.0)) {
                throw InputError("accuracy cell outside [0, 100] for subject '" +
                                 per_subject_results[s].subject_id + "'");
            }
            table.cells(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(c)) = v;
        }
    }

    table.mean_row.resize(table.cells.cols());
    for (Eigen::Index c = 0; c < table.cells.cols(); ++c) {
        table.mean_row[c] = round_percent(table.cells.col(c).mean());
    }

    for (int p = 0; p < 2; ++p) {
        Phase phase = p == 0 ? Phase::Observation : Phase::Movement;
        double best = -1.0;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (table.columns[c].first != phase) continue;
            if (table.mean_row[static_cast<Eigen::Index>(c)] > best) {
                best = table.mean_row[static_cast<Eigen::Index>(c)];
                table.best_mean_column_per_phase[static_cast<std::size_t>(p)] = static_cast<int>(c);
            }
        }
    }
    return table;
}

namespace {

std::string format_cell(double v) {
    // integral cells print without a decimal point
    double r = round_percent(v);
    if (std::abs(v - r) < 1e-9) return std::to_string(static_cast<long long>(r));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string column_header(const std::pair<Phase, BandName>& col) {
    return std::string(phase_label(col.first)) + "_" + std::string(band_label(col.second));
}

}  // namespace

std::string accuracy_table_to_csv(const AccuracyTable& table) {
    std::string out = "subject";
    for (const auto& col : table.columns) out += "," + column_header(col);
    out += "\n";
    for (std::size_t s = 0; s < table.subject_ids.size(); ++s) {
        out += table.subject_ids[s];
        for (Eigen::Index c = 0; c < table.cells.cols(); ++c) {
            out += "," + format_cell(table.cells(static_cast<Eigen::Index>(s), c));
        }
        out += "\n";
    }
    out += "Mean";
    for (Eigen::Index c = 0; c < table.mean_row.size(); ++c) {
        out += "," + format_cell(table.mean_row[c]);
    }
    out += "\n";
    return out;
}

std::string accuracy_table_to_markdown(const AccuracyTable& table) {
    std::string out = "| Subject |";
    for (const auto& col : table.columns) out += " " + column_header(col) + " |";
    out += "\n|---|";
    for (std::size_t c = 0; c < table.columns.size(); ++c) out += "---|";
    out += "\n";
    for (std::size_t s = 0; s < table.subject_ids.size(); ++s) {
        out += "| " + table.subject_ids[s] + " |";
        for (Eigen::Index c = 0; c < table.cells.cols(); ++c) {
            out += " " + format_cell(table.cells(static_cast<Eigen::Index>(s), c)) + " |";
        }
        out += "\n";
    }
    out += "| Mean |";
    for (Eigen::Index c = 0; c < table.mean_row.size(); ++c) {
        bool best = c == table.best_mean_column_per_phase[0] || c == table.best_mean_column_per_phase[1];
        std::string cell = format_cell(table.mean_row[c]);
        out += best ? " **" + cell + "** |" : " " + cell + " |";
    }
    out += "\n";
    return out;
}

}  // namespace graspdec
