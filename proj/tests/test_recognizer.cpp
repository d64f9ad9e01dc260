#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "slr/recognizer.hpp"
#include "testutil.hpp"

using namespace slr;

namespace {

IntervalRow point_row(const FeatureRow& v) {
    IntervalRow r;
    for (int f = 0; f < 7; ++f) r[f] = {v[f], v[f]};
    return r;
}

// Independent elementwise oracle for the interval similarity.
double oracle_frame_similarity(const IntervalRow& rf, const FeatureRow& tf) {
    double acc = 0;
    for (int d = 0; d < 7; ++d) {
        const double lo = rf[d].lo, hi = rf[d].hi, v = tf[d];
        double contrib;
        if (lo <= v && v <= hi) {
            contrib = 1.0;
        } else {
            const double a = 1.0 / (1.0 + std::fabs(lo - v));
            const double b = 1.0 / (1.0 + std::fabs(hi - v));
            contrib = a > b ? a : b;
        }
        acc += contrib;
    }
    return acc / 7.0;
}

SignTemplate template_from(const std::vector<KeyframeMatrix>& members,
                           const std::string& label) {
    std::vector<const KeyframeMatrix*> ptrs;
    for (const auto& m : members) ptrs.push_back(&m);
    SignTemplate tpl;
    tpl.label = label;
    tpl.member_count = static_cast<int>(members.size());
    tpl.intervals = aggregate_intervals(ptrs);
    return tpl;
}

}  // namespace

TEST_CASE("frame_similarity: containment branch and reciprocal branch") {
    rng::Engine eng(4);
    const auto v = test::random_row(eng, 0, 50);
    CHECK(frame_similarity(point_row(v), v) == 1.0);

    IntervalRow wide;
    for (int f = 0; f < 7; ++f) wide[f] = {v[f] - 1.0, v[f] + 1.0};
    CHECK(frame_similarity(wide, v) == 1.0);

    // one feature off by exactly 1: (6 + 1/2) / 7
    auto off = v;
    off[3] += 1.0;
    CHECK(frame_similarity(point_row(v), off) == doctest::Approx(13.0 / 14.0).epsilon(1e-15));

    IntervalRow inverted = point_row(v);
    inverted[0] = {2.0, 1.0};
    CHECK_THROWS_AS(frame_similarity(inverted, v), RecognizerError);
}

TEST_CASE("frame_similarity: matches the elementwise oracle to 1e-12") {
    rng::Engine eng(41);
    for (int i = 0; i < 2000; ++i) {
        IntervalRow rf;
        for (int f = 0; f < 7; ++f) {
            const double a = rng::uniform(eng, -50, 50);
            const double b = rng::uniform(eng, -50, 50);
            rf[f] = {std::min(a, b), std::max(a, b)};
        }
        const auto tf = test::random_row(eng, -60, 60);
        const double got = frame_similarity(rf, tf);
        CHECK(std::abs(got - oracle_frame_similarity(rf, tf)) <= 1e-12);
        CHECK(got > 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("frame_similarity: equals 1 only under full containment") {
    rng::Engine eng(42);
    const auto v = test::random_row(eng, 0, 10);
    IntervalRow rf = point_row(v);
    rf[6] = {v[6] + 0.001, v[6] + 0.5};  // one violated feature
    CHECK(frame_similarity(rf, v) < 1.0);
}

TEST_CASE("frame_similarity: non-increasing as the value leaves the interval") {
    IntervalRow rf;
    for (int f = 0; f < 7; ++f) rf[f] = {0.0, 1.0};
    FeatureRow v{};
    double prev = 1.0;
    for (double t = 0; t <= 5.0; t += 0.1) {
        v[2] = 1.0 + t;
        const double s = frame_similarity(rf, v);
        CHECK(s <= prev + 1e-15);
        prev = s;
    }
}

TEST_CASE("frame_similarity: widening an interval never lowers the score") {
    rng::Engine eng(43);
    for (int i = 0; i < 500; ++i) {
        IntervalRow rf;
        for (int f = 0; f < 7; ++f) {
            const double a = rng::uniform(eng, -10, 10);
            const double b = rng::uniform(eng, -10, 10);
            rf[f] = {std::min(a, b), std::max(a, b)};
        }
        const auto tf = test::random_row(eng, -12, 12);
        const double before = frame_similarity(rf, tf);
        IntervalRow wider = rf;
        const int f = static_cast<int>(rng::bounded(eng, 7));
        wider[f].lo -= rng::uniform(eng, 0, 5);
        wider[f].hi += rng::uniform(eng, 0, 5);
        CHECK(frame_similarity(wider, tf) >= before - 1e-15);
    }
}

TEST_CASE("total_similarity: exact K on a perfect match, K/2 at half scores") {
    rng::Engine eng(44);
    const auto m = test::random_matrix(eng, 40);
    SignTemplate tpl = template_from({m}, "A");
    CHECK(total_similarity(tpl, m) == 40.0);

    // point intervals displaced by exactly 1 in every feature: 0.5 per frame
    KeyframeMatrix displaced = m;
    for (auto& row : displaced.rows)
        for (auto& v : row) v += 1.0;
    CHECK(total_similarity(tpl, displaced) == doctest::Approx(20.0).epsilon(1e-12));

    const auto shorter = test::random_matrix(eng, 10);
    CHECK_THROWS_AS(total_similarity(tpl, shorter), RecognizerError);
}

TEST_CASE("total_similarity: members of an aggregated template score exactly K") {
    rng::Engine eng(45);
    std::vector<KeyframeMatrix> members;
    for (int i = 0; i < 4; ++i) members.push_back(test::random_matrix(eng, 40));
    const auto tpl = template_from(members, "A");
    for (const auto& m : members) CHECK(total_similarity(tpl, m) == 40.0);
}

TEST_CASE("recognize: single template, rejection threshold, ties") {
    rng::Engine eng(46);
    const auto m = test::random_matrix(eng, 8);
    Knowledgebase kb;
    kb.params.k = 8;
    kb.templates.push_back(template_from({m}, "only"));

    auto r = recognize(kb, test::random_matrix(eng, 8));
    CHECK(r.predicted_label == "only");
    CHECK_FALSE(r.rejected());

    r = recognize(kb, m, 9.0);  // unattainable: max total is K = 8
    CHECK(r.rejected());
    CHECK(r.best_score == 8.0);

    // two identical templates under different labels tie; label order wins
    kb.templates.push_back(kb.templates[0]);
    kb.templates[1].label = "zz";
    kb.templates.push_back(kb.templates[0]);
    kb.templates[2].label = "aa";
    r = recognize(kb, m);
    CHECK(r.ties == 3);
    CHECK(r.predicted_label == "aa");
    CHECK(std::is_sorted(r.ranked.begin(), r.ranked.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; }));

    CHECK_THROWS_AS(recognize(Knowledgebase{}, m), RecognizerError);
    CHECK_THROWS_AS(recognize(kb, test::random_matrix(eng, 5)), RecognizerError);
}

TEST_CASE("recognize: template order does not change the outcome") {
    const auto data = test::make_feature_dataset(6, 1, 4, 10, 7, 2.0);
    KbParams params;
    params.k = 10;
    Knowledgebase kb = build_knowledgebase(data, params);

    rng::Engine eng(47);
    KeyframeMatrix probe = data[5].keyframes;
    const auto before = recognize(kb, probe);

    Knowledgebase shuffled = kb;
    std::reverse(shuffled.templates.begin(), shuffled.templates.end());
    const auto after = recognize(shuffled, probe);
    CHECK(before.predicted_label == after.predicted_label);
    CHECK(before.best_score == after.best_score);
    CHECK(before.ties == after.ties);
}

TEST_CASE("recognize: replayed training member finds its own class") {
    const auto data = test::make_feature_dataset(9, 2, 5, 12, 31, 2.0);
    KbParams params;
    params.k = 12;
    const Knowledgebase kb = build_knowledgebase(data, params);
    for (const auto& inst : data) {
        const auto r = recognize(kb, inst.keyframes);
        CHECK(r.predicted_label == inst.label);
        CHECK(r.best_score == 12.0);
    }
}
