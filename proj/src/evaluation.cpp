#include "slr/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "slr/rng.hpp"

namespace slr {

int ConfusionMatrix::index_of(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

long ConfusionMatrix::row_sum(std::size_t i) const {
    long s = rejected[i];
    for (long v : counts[i]) s += v;
    return s;
}

ConfusionMatrix make_confusion_matrix(const std::vector<std::string>& labels) {
    ConfusionMatrix cm;
    cm.labels = labels;
    cm.counts.assign(labels.size(), std::vector<long>(labels.size(), 0));
    cm.rejected.assign(labels.size(), 0);
    return cm;
}

void record(ConfusionMatrix& cm, const std::string& true_label,
            const std::optional<std::string>& predicted) {
    const int i = cm.index_of(true_label);
    if (i < 0) throw EvaluationError("confusion matrix: unknown true label " + true_label);
    if (!predicted) {
        ++cm.rejected[i];
        return;
    }
    const int j = cm.index_of(*predicted);
    if (j < 0) throw EvaluationError("confusion matrix: unknown predicted label " + *predicted);
    ++cm.counts[i][j];
}

FMeasures f_measure(const ConfusionMatrix& cm, const std::vector<bool>* include) {
    const std::size_t n = cm.labels.size();
    FMeasures out;
    out.per_class.assign(n, 0.0);
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        long row = 0, col = 0;
        for (std::size_t j = 0; j < n; ++j) {
            row += cm.counts[i][j];
            col += cm.counts[j][i];
        }
        row += cm.rejected[i];
        const long correct = cm.counts[i][i];
        const double precision = col > 0 ? static_cast<double>(correct) / col : 0.0;
        const double recall = row > 0 ? static_cast<double>(correct) / row : 0.0;
        out.per_class[i] =
            precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        if (!include || (*include)[i]) {
            sum += out.per_class[i];
            ++counted;
        }
    }
    out.macro = counted > 0 ? sum / static_cast<double>(counted) : 0.0;
    return out;
}

std::string cm_to_text(const ConfusionMatrix& cm) {
    std::size_t w = 4;
    for (const auto& l : cm.labels) w = std::max(w, l.size() + 1);
    std::ostringstream out;
    out << std::setw(static_cast<int>(w)) << "";
    for (const auto& l : cm.labels) out << std::setw(static_cast<int>(w)) << l;
    const bool any_rejected =
        std::any_of(cm.rejected.begin(), cm.rejected.end(), [](long r) { return r > 0; });
    if (any_rejected) out << std::setw(static_cast<int>(w)) << "rej";
    out << "\n";
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out << std::setw(static_cast<int>(w)) << cm.labels[i];
        for (long v : cm.counts[i]) out << std::setw(static_cast<int>(w)) << v;
        if (any_rejected) out << std::setw(static_cast<int>(w)) << cm.rejected[i];
        out << "\n";
    }
    return out.str();
}

std::string cm_to_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "true\\predicted";
    for (const auto& l : cm.labels) out << "," << l;
    out << ",rejected\n";
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out << cm.labels[i];
        for (long v : cm.counts[i]) out << "," << v;
        out << "," << cm.rejected[i] << "\n";
    }
    return out.str();
}

TrialSummary summarize(const std::vector<TrialReport>& reports) {
    TrialSummary s;
    if (reports.empty()) return s;
    for (const auto& r : reports) s.mean += r.f.macro;
    s.mean /= static_cast<double>(reports.size());
    double ss = 0.0;
    for (const auto& r : reports) ss += (r.f.macro - s.mean) * (r.f.macro - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(reports.size()));
    return s;
}

std::map<std::string, std::vector<int>> group_by_class(
    const std::vector<SignInstance>& data) {
    std::map<std::string, std::vector<int>> by_class;
    for (std::size_t i = 0; i < data.size(); ++i)
        by_class[data[i].label].push_back(static_cast<int>(i));
    return by_class;
}

Split split_within_clusters(
    const std::map<std::string, std::vector<std::vector<int>>>& clusters, SplitRatio ratio,
    std::uint64_t seed) {
    if (ratio.train_pct + ratio.test_pct != 100)
        throw EvaluationError("split ratio must sum to 100");
    rng::Engine eng(rng::mix(seed, "split"));
    Split split;
    for (const auto& [label, class_clusters] : clusters) {
        if (class_clusters.empty())
            throw EvaluationError("split: class " + label + " has no clusters");
        for (const auto& cluster : class_clusters) {
            const long q = static_cast<long>(cluster.size());
            std::vector<int> members = cluster;
            rng::shuffle(members, eng);
            const long n_train =
                q == 1 ? 1 : (q * ratio.train_pct + 99) / 100;  // ceiling
            for (long i = 0; i < q; ++i)
                (i < n_train ? split.train : split.test).push_back(members[i]);
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

namespace {

std::vector<std::string> sorted_labels(const std::map<std::string, std::vector<int>>& by_class) {
    std::vector<std::string> labels;
    labels.reserve(by_class.size());
    for (const auto& [label, _] : by_class) labels.push_back(label);
    return labels;
}

// Point-interval (crisp) template from a single instance.
SignTemplate crisp_template(const SignInstance& inst, int cluster_id) {
    SignTemplate tpl;
    tpl.label = inst.label;
    tpl.cluster_id = cluster_id;
    tpl.member_count = 1;
    tpl.members.push_back(inst.id());
    tpl.intervals.reserve(inst.keyframes.k());
    for (const auto& row : inst.keyframes.rows) {
        IntervalRow iv;
        for (std::size_t f = 0; f < kFeatureCount; ++f) iv[f] = {row[f], row[f]};
        tpl.intervals.push_back(iv);
    }
    return tpl;
}

int kb_key_frames(const std::vector<SignInstance>& data) {
    if (data.empty()) throw EvaluationError("empty dataset");
    return static_cast<int>(data.front().keyframes.k());
}

TrialReport score_trial(const std::vector<SignInstance>& data, const Knowledgebase& kb,
                        const std::vector<int>& test_idx,
                        const std::vector<std::string>& labels,
                        std::optional<double> reject_threshold) {
    TrialReport rep;
    rep.cm = make_confusion_matrix(labels);
    rep.reference_count = static_cast<int>(kb.templates.size());
    rep.test_count = static_cast<int>(test_idx.size());
    for (int idx : test_idx) {
        const auto result = recognize(kb, data[idx].keyframes, reject_threshold);
        record(rep.cm, data[idx].label, result.predicted_label);
    }
    rep.f = f_measure(rep.cm);
    return rep;
}

}  // namespace

std::vector<TrialReport> run_holdout(const std::vector<SignInstance>& data,
                                     const KbParams& params, SplitRatio ratio, int trials,
                                     std::uint64_t seed,
                                     std::optional<double> reject_threshold) {
    if (trials < 1) throw EvaluationError("holdout: trials must be >= 1");
    const auto by_class = group_by_class(data);
    const auto labels = sorted_labels(by_class);

    // The clustering step sees the full class, so it is trial-independent;
    // trials differ only in the within-cluster split.
    std::map<std::string, std::vector<std::vector<int>>> clusters;
    std::map<std::string, double> thresholds;
    for (const auto& [label, indices] : by_class) {
        std::vector<const KeyframeMatrix*> matrices;
        for (int i : indices) matrices.push_back(&data[i].keyframes);
        auto cc = cluster_class(matrices, params);
        thresholds[label] = cc.th;
        auto& out = clusters[label];
        for (const auto& cluster : cc.clusters) {
            std::vector<int> mapped;
            for (int local : cluster) mapped.push_back(indices[local]);
            out.push_back(std::move(mapped));
        }
    }

    std::vector<TrialReport> reports;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = rng::mix(seed, static_cast<std::uint64_t>(t));
        const Split split = split_within_clusters(clusters, ratio, trial_seed);

        Knowledgebase kb;
        kb.params = params;
        kb.params.k = kb_key_frames(data);
        std::set<int> train_set(split.train.begin(), split.train.end());
        for (const auto& [label, class_clusters] : clusters) {
            kb.class_thresholds.push_back({label, thresholds[label]});
            int cluster_id = 0;
            for (const auto& cluster : class_clusters) {
                std::vector<const KeyframeMatrix*> members;
                std::vector<std::string> member_ids;
                for (int idx : cluster) {
                    if (!train_set.count(idx)) continue;
                    members.push_back(&data[idx].keyframes);
                    member_ids.push_back(data[idx].id());
                }
                if (members.empty()) continue;  // cannot happen under ceiling rule
                SignTemplate tpl;
                tpl.label = label;
                tpl.cluster_id = cluster_id++;
                tpl.member_count = static_cast<int>(members.size());
                tpl.members = std::move(member_ids);
                tpl.intervals = aggregate_intervals(members);
                kb.templates.push_back(std::move(tpl));
            }
        }

        TrialReport rep = score_trial(data, kb, split.test, labels, reject_threshold);
        rep.train_count = static_cast<int>(split.train.size());
        rep.protocol = "holdout";
        rep.fold = std::to_string(t);
        rep.ratio = ratio.name();
        rep.seed = trial_seed;
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<TrialReport> run_loo(const std::vector<SignInstance>& data, int trials,
                                 std::uint64_t seed,
                                 std::optional<double> reject_threshold) {
    if (trials < 1) throw EvaluationError("loo: trials must be >= 1");
    const auto by_class = group_by_class(data);
    const auto labels = sorted_labels(by_class);

    std::vector<TrialReport> reports;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = rng::mix(seed, static_cast<std::uint64_t>(t));
        rng::Engine eng(trial_seed);
        std::vector<int> test_idx;
        std::set<int> held;
        for (const auto& [label, indices] : by_class) {
            const int pick = indices[rng::bounded(eng, indices.size())];
            test_idx.push_back(pick);
            held.insert(pick);
        }

        Knowledgebase kb;
        kb.params.k = kb_key_frames(data);
        std::map<std::string, int> next_cluster;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (held.count(static_cast<int>(i))) continue;
            kb.templates.push_back(crisp_template(data[i], next_cluster[data[i].label]++));
        }

        TrialReport rep = score_trial(data, kb, test_idx, labels, reject_threshold);
        rep.train_count = static_cast<int>(data.size() - test_idx.size());
        rep.protocol = "loo";
        rep.fold = std::to_string(t);
        rep.seed = trial_seed;
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<TrialReport> run_kfold(const std::vector<SignInstance>& data, int k,
                                   std::uint64_t seed,
                                   std::optional<double> reject_threshold) {
    if (k < 1) throw EvaluationError("kfold: k must be >= 1");
    const auto by_class = group_by_class(data);
    const auto labels = sorted_labels(by_class);
    for (const auto& [label, indices] : by_class)
        if (static_cast<int>(indices.size()) < 2)
            throw EvaluationError("kfold: class " + label + " has fewer than 2 instances");

    std::vector<TrialReport> reports;
    for (int round = 0; round < k; ++round) {
        const std::uint64_t round_seed = rng::mix(seed, static_cast<std::uint64_t>(round));
        rng::Engine eng(round_seed);
        std::vector<int> test_idx;
        std::set<int> held;
        for (const auto& [label, indices] : by_class) {
            std::vector<int> shuffled = indices;
            rng::shuffle(shuffled, eng);
            const long n_test = std::max<long>(1, static_cast<long>(shuffled.size()) / 4);
            for (long i = 0; i < n_test; ++i) {
                test_idx.push_back(shuffled[i]);
                held.insert(shuffled[i]);
            }
        }
        std::sort(test_idx.begin(), test_idx.end());

        Knowledgebase kb;
        kb.params.k = kb_key_frames(data);
        std::map<std::string, int> next_cluster;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (held.count(static_cast<int>(i))) continue;
            kb.templates.push_back(crisp_template(data[i], next_cluster[data[i].label]++));
        }

        TrialReport rep = score_trial(data, kb, test_idx, labels, reject_threshold);
        rep.train_count = static_cast<int>(data.size() - test_idx.size());
        rep.protocol = "kfold";
        rep.fold = std::to_string(round);
        rep.seed = round_seed;
        reports.push_back(std::move(rep));
    }
    return reports;
}

std::vector<TrialReport> run_signer_independent(
    const std::vector<SignInstance>& data, const KbParams& params,
    std::optional<double> reject_threshold) {
    std::set<std::string> signer_set;
    for (const auto& inst : data) signer_set.insert(inst.signer);
    if (signer_set.size() < 2)
        throw EvaluationError("signer-independent evaluation needs at least 2 signers");

    const auto by_class = group_by_class(data);
    const auto labels = sorted_labels(by_class);

    std::vector<TrialReport> reports;
    for (const auto& signer : signer_set) {
        std::vector<SignInstance> train;
        std::vector<int> test_idx;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data[i].signer == signer)
                test_idx.push_back(static_cast<int>(i));
            else
                train.push_back(data[i]);
        }
        if (train.empty() || test_idx.empty())
            throw EvaluationError("signer-independent: degenerate fold for signer " + signer);

        KbParams fold_params = params;
        fold_params.k = kb_key_frames(data);
        const Knowledgebase kb = build_knowledgebase(train, fold_params);

        std::set<std::string> trained;
        for (const auto& ct : kb.class_thresholds) trained.insert(ct.label);

        TrialReport rep;
        rep.cm = make_confusion_matrix(labels);
        rep.reference_count = static_cast<int>(kb.templates.size());
        rep.train_count = static_cast<int>(train.size());
        rep.test_count = static_cast<int>(test_idx.size());
        std::vector<bool> include(labels.size(), false);
        std::vector<long> tested(labels.size(), 0);
        for (int idx : test_idx) {
            const auto result = recognize(kb, data[idx].keyframes, reject_threshold);
            record(rep.cm, data[idx].label, result.predicted_label);
            ++tested[rep.cm.index_of(data[idx].label)];
        }
        // Macro average covers classes with both training templates and
        // test instances in this fold.
        for (std::size_t i = 0; i < labels.size(); ++i) {
            include[i] = trained.count(labels[i]) > 0 && tested[i] > 0;
            if (!trained.count(labels[i])) rep.excluded_classes.push_back(labels[i]);
        }
        rep.f = f_measure(rep.cm, &include);
        rep.protocol = "signer-independent";
        rep.fold = signer;
        reports.push_back(std::move(rep));
    }
    return reports;
}

}  // namespace slr
