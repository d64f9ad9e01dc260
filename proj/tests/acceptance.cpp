// Acceptance suite: one self-contained check per shipped guarantee, each
// printed as a single pass/fail line. Returns nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "slr/evaluation.hpp"
#include "slr/pipeline.hpp"
#include "slr/recognizer.hpp"
#include "slr/rng.hpp"
#include "slr/synth.hpp"
#include "testutil.hpp"

using namespace slr;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) {
            pass = false;
            detail = what;
        }
    }
};

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- 1: Eq.-style interval similarity vs an independent oracle ----------

double oracle_similarity(const IntervalRow& rf, const FeatureRow& tf) {
    double acc = 0;
    for (int d = 0; d < 7; ++d) {
        if (rf[d].lo <= tf[d] && tf[d] <= rf[d].hi) {
            acc += 1.0;
        } else {
            const double a = 1.0 / (1.0 + std::fabs(rf[d].lo - tf[d]));
            const double b = 1.0 / (1.0 + std::fabs(rf[d].hi - tf[d]));
            acc += a > b ? a : b;
        }
    }
    return acc / 7.0;
}

Outcome criterion_similarity_oracle() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    rng::Engine eng(101);
    for (int i = 0; i < 1000; ++i) {
        IntervalRow rf;
        for (int f = 0; f < 7; ++f) {
            const double a = rng::uniform(eng, -100, 100);
            const double b = rng::uniform(eng, -100, 100);
            rf[f] = {std::min(a, b), std::max(a, b)};
        }
        const FeatureRow tf = test::random_row(eng, -120, 120);
        out.require(std::fabs(frame_similarity(rf, tf) - oracle_similarity(rf, tf)) <= 1e-12,
                    "similarity deviates from oracle beyond 1e-12");
    }
    out.require(elapsed_s(start) < 1.0, "exceeded 1 s budget");
    return out;
}

// ---- 2: training members score exactly K against their template ---------

Outcome criterion_containment_self_match() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    const auto data = test::make_feature_dataset(26, 2, 6, 40, 202, 3.0);
    KbParams params;
    params.k = 40;
    params.delta = 0.5;
    const Knowledgebase kb = build_knowledgebase(data, params);

    std::map<std::string, const SignInstance*> by_id;
    for (const auto& inst : data) by_id[inst.id()] = &inst;
    std::size_t checked = 0;
    for (const auto& tpl : kb.templates) {
        for (const auto& member : tpl.members) {
            out.require(by_id.count(member) == 1, "unknown member id " + member);
            if (!by_id.count(member)) continue;
            out.require(total_similarity(tpl, by_id[member]->keyframes) == 40.0,
                        member + " does not score exactly 40");
            ++checked;
        }
    }
    out.require(checked == data.size(), "not every training member was covered");
    out.require(elapsed_s(start) < 10.0, "exceeded 10 s budget");
    return out;
}

// ---- 3: key frames are brute-force medoids -------------------------------

Outcome criterion_medoid_bruteforce() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    rng::Engine eng(303);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng::bounded(eng, 49));
        const int k = 1 + static_cast<int>(rng::bounded(eng, std::min(n, 40)));
        std::vector<FrameFeatures> feats;
        for (int i = 0; i < n; ++i)
            feats.push_back(FrameFeatures::from_array(test::random_row(eng, 0, 100)));

        const auto sel = select_keyframes_detailed(feats, k, 1000 + trial);
        std::vector<std::vector<int>> members(k);
        for (int i = 0; i < n; ++i) members[sel.assignment[i]].push_back(i);
        for (int c = 0; c < k; ++c) {
            double best = std::numeric_limits<double>::infinity();
            int best_idx = -1;  // first minimum = smallest frame index
            for (int i : members[c]) {
                double s = 0;
                for (int j : members[c])
                    s += row_distance(feats[i].as_array(), feats[j].as_array());
                if (s < best) {
                    best = s;
                    best_idx = i;
                }
            }
            out.require(sel.medoids[c] == best_idx, "medoid differs from O(n^2) search");
        }
    }
    out.require(elapsed_s(start) < 30.0, "exceeded 30 s budget");
    return out;
}

// ---- 4: inconsistency coefficients and the adaptive threshold ------------

Outcome criterion_inconsistency_hand_values() {
    Outcome out;
    Dendrogram d;
    d.leaf_count = 5;
    d.links = {{0, 1, 1.0, 2}, {5, 2, 1.0, 3}, {6, 3, 1.0, 4}, {7, 4, 10.0, 5}};

    const auto coeffs = inconsistency(d, 2);
    out.require(coeffs.size() == 4, "wrong coefficient count");
    out.require(coeffs[0] == 0.0 && coeffs[1] == 0.0 && coeffs[2] == 0.0,
                "equal-height links must have coefficient 0");
    // root: heights {10,1}, mean 5.5, sample std sqrt(40.5) => 1/sqrt(2)
    out.require(std::fabs(coeffs[3] - 1.0 / std::sqrt(2.0)) <= 1e-9,
                "root coefficient differs from hand-computed value");

    // threshold arithmetic: gamma = population std of {0.8, 1.2} = 0.2
    const std::vector<double> cs{0.0, 0.8, 1.2};
    out.require(std::fabs(cut_threshold(cs, 1.0) - 1.0) <= 1e-12, "Th(delta=1.0) != 1.0");
    out.require(std::fabs(cut_threshold(cs, 0.5) - 1.1) <= 1e-12, "Th(delta=0.5) != 1.1");
    out.require(std::fabs(cut_threshold(cs, 0.1) - 1.18) <= 1e-12, "Th(delta=0.1) != 1.18");

    // single non-zero coefficient: gamma = 0, Th = max for every delta
    for (const double delta : {1.0, 0.5, 0.1})
        out.require(std::fabs(cut_threshold(coeffs, delta) - coeffs[3]) <= 1e-12,
                    "gamma=0 threshold must equal the max coefficient");
    return out;
}

// ---- 5: dendrogram cut monotonicity and edges -----------------------------

Outcome criterion_cut_monotonicity() {
    Outcome out;
    rng::Engine eng(505);
    std::vector<KeyframeMatrix> insts;
    for (int i = 0; i < 14; ++i) insts.push_back(test::random_matrix(eng, 6));
    const auto d = linkage(insts);
    const auto coeffs = inconsistency(d, 2);

    double lo = coeffs[0], hi = coeffs[0];
    for (double c : coeffs) {
        lo = std::min(lo, c);
        hi = std::max(hi, c);
    }
    std::size_t prev = insts.size() + 1;
    for (int step = 0; step <= 200; ++step) {
        const double th = lo - 0.5 + (hi - lo + 1.0) * step / 200.0;
        const auto clusters = cut(d, coeffs, th);
        out.require(clusters.size() <= prev, "cluster count increased with Th");
        prev = clusters.size();
        std::size_t covered = 0;
        for (const auto& c : clusters) covered += c.size();
        out.require(covered == insts.size(), "cut is not a partition");
    }
    out.require(cut(d, coeffs, std::numeric_limits<double>::infinity()).size() == 1,
                "Th=inf must give one cluster");

    // all-positive synthetic coefficients, Th below all of them: singletons
    const std::vector<double> positive{0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3,
                                       1.4, 1.5, 1.6, 1.7};
    out.require(cut(d, positive, 0.4).size() == insts.size(),
                "Th below all positive coefficients must give singletons");
    return out;
}

// ---- 6: geometric invariances of the feature vector -----------------------

Outcome criterion_geometry_invariances() {
    Outcome out;
    rng::Engine eng(606);
    constexpr double pi = std::numbers::pi;
    for (int i = 0; i < 1000; ++i) {
        // quarter-pixel lattice coordinates: integer translation is exact
        auto snap = [&]() { return static_cast<double>(rng::bounded(eng, 2000)) * 0.25; };
        TrackedFrame tf;
        tf.c1 = {snap(), snap()};
        tf.c2 = {snap(), snap()};
        tf.c3 = {snap(), snap()};
        tf.gc = {snap(), snap()};
        const auto f = compute_features(tf);

        const Point t{static_cast<double>(rng::bounded(eng, 4001)) - 2000.0,
                      static_cast<double>(rng::bounded(eng, 4001)) - 2000.0};
        TrackedFrame moved = tf;
        moved.c1 = moved.c1 + t;
        moved.c2 = moved.c2 + t;
        moved.c3 = moved.c3 + t;
        moved.gc = moved.gc + t;
        out.require(compute_features(moved).as_array() == f.as_array(),
                    "translation changed the features");

        const double ang = rng::uniform(eng, 0, 2 * pi);
        const Point about{rng::uniform(eng, -100, 600), rng::uniform(eng, -100, 600)};
        auto rot = [&](const Point& p) {
            const Point v = p - about;
            return Point{about.x + std::cos(ang) * v.x - std::sin(ang) * v.y,
                         about.y + std::sin(ang) * v.x + std::cos(ang) * v.y};
        };
        TrackedFrame spun = tf;
        spun.c1 = rot(spun.c1);
        spun.c2 = rot(spun.c2);
        spun.c3 = rot(spun.c3);
        spun.gc = rot(spun.gc);
        const auto g = compute_features(spun).as_array();
        const auto base = f.as_array();
        for (int k = 0; k < 7; ++k)
            out.require(std::fabs(g[k] - base[k]) <= 1e-9, "rotation moved a feature");

        const double s = rng::uniform(eng, 0.1, 10.0);
        TrackedFrame scaled = tf;
        scaled.c1 = s * scaled.c1;
        scaled.c2 = s * scaled.c2;
        scaled.c3 = s * scaled.c3;
        scaled.gc = s * scaled.gc;
        const auto h = compute_features(scaled).as_array();
        for (int k = 0; k < 6; ++k)
            out.require(std::fabs(h[k] - s * base[k]) <= 1e-9 * std::max(1.0, s * base[k]),
                        "scaling is not linear in the distances");
        out.require(std::fabs(h[6] - base[6]) <= 1e-9, "scaling changed theta");

        out.require(f.d4 <= f.d1 + f.d2 && f.d5 <= f.d1 + f.d3 && f.d6 <= f.d2 + f.d3,
                    "triangle inequality violated");
    }
    return out;
}

// ---- 7: overlap resolution formulas ---------------------------------------

Outcome criterion_overlap_formulas() {
    Outcome out;
    rng::Engine eng(707);
    for (int i = 0; i < 1000; ++i) {
        const Point a{rng::uniform(eng, -500, 500), rng::uniform(eng, -500, 500)};
        const Point b{rng::uniform(eng, -500, 500), rng::uniform(eng, -500, 500)};
        const Point c{rng::uniform(eng, -500, 500), rng::uniform(eng, -500, 500)};

        const Point face = resolve_overlap_face(a, c);
        out.require(face.x == (a.x + c.x) / 2.0 && face.y == (a.y + c.y) / 2.0,
                    "face-overlap mean formula mismatch");

        const auto [m, nm] = resolve_overlap_hands(a, b, c);
        out.require(m.x == (a.x + c.x) / 2.0 && m.y == (a.y + c.y) / 2.0,
                    "hand-overlap manual mean mismatch");
        out.require(nm.x == (b.x + c.x) / 2.0 && nm.y == (b.y + c.y) / 2.0,
                    "hand-overlap non-manual mean mismatch");
    }
    return out;
}

// ---- 8 + 9: rendered end-to-end runs --------------------------------------

std::vector<SignInstance> render_and_process(const SynthConfig& cfg,
                                             const std::filesystem::path& dir,
                                             const PipelineConfig& pcfg) {
    const auto specs = make_class_specs(cfg);
    generate_dataset(specs, cfg, dir);
    const auto manifest = load_manifest(dir / "manifest.txt");
    return process_dataset(manifest, pcfg);
}

bool row_sums_match(const TrialReport& r) {
    std::map<std::string, long> per_class;
    for (std::size_t i = 0; i < r.cm.labels.size(); ++i)
        per_class[r.cm.labels[i]] = r.cm.row_sum(i);
    long total = 0;
    for (const auto& [label, n] : per_class) total += n;
    return total == r.test_count;
}

Outcome criterion_end_to_end(std::string& note) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    test::TempDir dir("acceptance-e2e");

    SynthConfig cfg;
    cfg.classes = 10;
    cfg.signers = 4;
    cfg.instances = 10;
    cfg.noise = 2.0;
    cfg.seed = 808;
    PipelineConfig pcfg;
    pcfg.seed = 808;

    const auto data = render_and_process(cfg, dir.path(), pcfg);
    out.require(data.size() == 400, "expected 400 processed instances");

    const auto holdout = run_holdout(data, kb_params(pcfg), {60, 40}, 5, 808);
    for (const auto& r : holdout) {
        out.require(r.f.macro >= 0.90, "holdout trial below macro F 0.90");
        out.require(row_sums_match(r), "holdout confusion row sums mismatch");
    }

    const auto signer = run_signer_independent(data, kb_params(pcfg));
    out.require(signer.size() == 4, "expected 4 signer folds");
    for (const auto& r : signer)
        out.require(row_sums_match(r), "signer confusion row sums mismatch");
    const double mean = summarize(signer).mean;
    out.require(mean >= 0.75, "signer-independent mean below 0.75");

    const double secs = elapsed_s(start);
    out.require(secs < 300.0, "exceeded 5 min budget");
    std::ostringstream n;
    n.setf(std::ios::fixed);
    n.precision(3);
    n << "holdout macro F " << summarize(holdout).mean << ", signer-independent " << mean;
    note = n.str();
    return out;
}

Outcome criterion_protocol_shape(std::vector<SignInstance>& data_out) {
    Outcome out;
    test::TempDir dir("acceptance-shape");

    SynthConfig cfg;
    cfg.width = 64;
    cfg.height = 48;
    cfg.classes = 26;
    cfg.signers = 4;
    cfg.instances = 10;
    cfg.duration_min = 8;
    cfg.duration_max = 10;
    cfg.signer_jitter = 0.5;
    cfg.instance_jitter = 0.25;
    cfg.noise = 0.0;
    cfg.min_class_separation = 0.0;  // shape fidelity only
    cfg.seed = 909;
    PipelineConfig pcfg;
    pcfg.seed = 909;

    const auto data = render_and_process(cfg, dir.path(), pcfg);
    out.require(data.size() == 1040, "expected 1040 processed instances");

    const auto loo = run_loo(data, 3, 909);
    for (const auto& r : loo) {
        out.require(r.reference_count == 1014, "LOO must use 1014 reference signs");
        out.require(r.test_count == 26, "LOO must test 26 signs");
        out.require(row_sums_match(r), "LOO confusion row sums mismatch");
    }

    const auto folds = run_kfold(data, 10, 909);
    out.require(folds.size() == 10, "expected 10 folds");
    for (const auto& r : folds) {
        out.require(r.reference_count == 780, "10-fold must use 780 reference signs");
        out.require(r.test_count == 260, "10-fold must test 260 signs");
        out.require(row_sums_match(r), "10-fold confusion row sums mismatch");
        for (std::size_t i = 0; i < r.cm.labels.size(); ++i)
            out.require(r.cm.row_sum(i) == 10, "per-class test count must be 10");
    }

    data_out = data;
    return out;
}

// ---- 10: determinism and persistence ---------------------------------------

Outcome criterion_determinism(const std::vector<SignInstance>& data) {
    Outcome out;
    test::TempDir dir("acceptance-det");
    KbParams params;
    params.k = 40;
    params.delta = 0.5;

    const Knowledgebase kb1 = build_knowledgebase(data, params);
    const Knowledgebase kb2 = build_knowledgebase(data, params);
    out.require(save_kb(kb1) == save_kb(kb2), "kb serialization differs across runs");

    save_kb_file(dir.path() / "kb.txt", kb1);
    const Knowledgebase loaded = load_kb_file(dir.path() / "kb.txt");
    out.require(loaded == kb1, "kb save/load round trip is not bit exact");
    out.require(save_kb(loaded) == save_kb(kb1), "re-serialized kb differs");

    const auto a = run_holdout(data, params, {60, 40}, 2, 33);
    const auto b = run_holdout(data, params, {60, 40}, 2, 33);
    out.require(a.size() == b.size(), "trial counts differ");
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.require(a[i].f.macro == b[i].f.macro, "trial macro F differs across runs");
        out.require(a[i].cm.counts == b[i].cm.counts, "confusion matrices differ");
        out.require(a[i].seed == b[i].seed, "trial seeds differ");
    }
    return out;
}

}  // namespace

int main() {
    int failures = 0;
    int index = 0;
    auto run = [&](const std::string& name, const std::function<Outcome()>& fn) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %2d [%s] %s (%.2f s)%s%s\n", ++index,
                    out.pass ? "PASS" : "FAIL", name.c_str(), elapsed_s(start),
                    out.detail.empty() ? "" : " -- ", out.detail.c_str());
        if (!out.pass) ++failures;
    };

    std::string e2e_note;
    std::vector<SignInstance> shape_data;

    run("interval similarity matches an independent oracle on 1000 pairs (1e-12)",
        criterion_similarity_oracle);
    run("every training member scores exactly 40.0 against its own template",
        criterion_containment_self_match);
    run("selected key frames equal O(n^2) brute-force medoids (100 instances)",
        criterion_medoid_bruteforce);
    run("inconsistency coefficients and adaptive threshold match hand arithmetic",
        criterion_inconsistency_hand_values);
    run("dendrogram cut: monotone cluster counts, correct edge behavior",
        criterion_cut_monotonicity);
    run("feature invariances: translation exact, rotation/scale within 1e-9, triangles",
        criterion_geometry_invariances);
    run("overlap resolution equals the mean formulas on 1000 random inputs",
        criterion_overlap_formulas);
    run("end-to-end synthetic 10x4x10: holdout >= 0.90 per trial, signer mean >= 0.75",
        [&] { return criterion_end_to_end(e2e_note); });
    if (!e2e_note.empty()) std::printf("             %s\n", e2e_note.c_str());
    run("protocol shape on 26x4x10: LOO 1014/26, 10-fold 780/260, row sums",
        [&] { return criterion_protocol_shape(shape_data); });
    run("determinism: bit-identical kb bytes, reports and save/load round trip",
        [&] { return criterion_determinism(shape_data); });

    std::printf("%d/%d criteria passed\n", index - failures, index);
    return failures == 0 ? 0 : 1;
}
