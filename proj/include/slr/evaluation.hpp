#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "slr/recognizer.hpp"
#include "slr/symbolic_kb.hpp"

namespace slr {

struct EvaluationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<long>> counts;  // counts[true][predicted]
    std::vector<long> rejected;             // per true class

    int index_of(const std::string& label) const;
    long row_sum(std::size_t i) const;
};

ConfusionMatrix make_confusion_matrix(const std::vector<std::string>& labels);
void record(ConfusionMatrix& cm, const std::string& true_label,
            const std::optional<std::string>& predicted);

struct FMeasures {
    std::vector<double> per_class;  // aligned with cm.labels
    double macro = 0.0;
};

// Per-class F1 from the matrix: precision over the predicted column, recall
// over the true row, zero when undefined. Macro is the unweighted mean over
// the included classes (all classes when `include` is null).
FMeasures f_measure(const ConfusionMatrix& cm, const std::vector<bool>* include = nullptr);

std::string cm_to_text(const ConfusionMatrix& cm);
std::string cm_to_csv(const ConfusionMatrix& cm);

struct TrialReport {
    std::string protocol;
    std::string fold;  // trial number, fold number, or held-out signer
    std::string ratio; // "60:40" for holdout, empty otherwise
    std::uint64_t seed = 0;
    int reference_count = 0;  // templates in the knowledgebase
    int train_count = 0;      // instances on the training side
    int test_count = 0;
    FMeasures f;
    ConfusionMatrix cm;
    std::vector<std::string> excluded_classes;  // absent from training
};

struct TrialSummary {
    double mean = 0.0;
    double stddev = 0.0;  // population std; 0 for a single trial
};

TrialSummary summarize(const std::vector<TrialReport>& reports);

// Groups instance indices per class, classes in label order.
std::map<std::string, std::vector<int>> group_by_class(
    const std::vector<SignInstance>& data);

// Per-cluster seeded split: ceil(train% * size) members go to training,
// the rest to test; singleton clusters train only. Clusters are index
// lists into the caller's dataset.
struct SplitRatio {
    int train_pct = 60;
    int test_pct = 40;

    std::string name() const {
        return std::to_string(train_pct) + ":" + std::to_string(test_pct);
    }
};
struct Split {
    std::vector<int> train;
    std::vector<int> test;
};
Split split_within_clusters(const std::map<std::string, std::vector<std::vector<int>>>& clusters,
                            SplitRatio ratio, std::uint64_t seed);

// Holdout protocol: per class, cluster all instances once (adaptive
// threshold at the given delta), then per trial split within clusters,
// aggregate the training members of each cluster into a template, and
// recognize every held-out instance.
std::vector<TrialReport> run_holdout(const std::vector<SignInstance>& data,
                                     const KbParams& params, SplitRatio ratio, int trials,
                                     std::uint64_t seed,
                                     std::optional<double> reject_threshold = std::nullopt);

// Leave-one-out in crisp mode: per trial, one random test instance per
// class; every remaining instance becomes a point-interval template.
std::vector<TrialReport> run_loo(const std::vector<SignInstance>& data, int trials,
                                 std::uint64_t seed,
                                 std::optional<double> reject_threshold = std::nullopt);

// k randomized reference/test rounds in crisp mode, holding out a quarter
// of each class per round (the reference/test proportions reported for
// this protocol's source experiment).
std::vector<TrialReport> run_kfold(const std::vector<SignInstance>& data, int k,
                                   std::uint64_t seed,
                                   std::optional<double> reject_threshold = std::nullopt);

// Leave-one-signer-out with the full symbolic pipeline per fold. Classes
// missing from a fold's training side are reported and excluded from that
// fold's macro average.
std::vector<TrialReport> run_signer_independent(
    const std::vector<SignInstance>& data, const KbParams& params,
    std::optional<double> reject_threshold = std::nullopt);

}  // namespace slr
