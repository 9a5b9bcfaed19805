#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "lshfed/election.hpp"

using namespace lshfed;

TEST_CASE("quantile_score is the affine rank map") {
    // (R - r) / (R - 1) with R = 5: rank 3 scores (5-3)/(5-1) = 0.5.
    const std::map<int, double> q = quantile_score({{10, 1}, {11, 2}, {12, 3}, {13, 4}, {14, 5}});
    CHECK(q.at(10) == 1.0);
    CHECK(q.at(12) == 0.5);
    CHECK(q.at(14) == 0.0);
}

TEST_CASE("quantile endpoints are exact for every pool size") {
    for (int R = 2; R <= 100; ++R) {
        std::vector<std::pair<int, int>> ranking;
        for (int r = 1; r <= R; ++r)
            ranking.emplace_back(r, r);
        const auto q = quantile_score(ranking);
        CHECK(q.at(1) == 1.0); // best rank
        CHECK(q.at(R) == 0.0); // worst rank
    }
}

TEST_CASE("a single-entry pool scores 1.0") {
    const auto q = quantile_score({{7, 1}});
    CHECK(q.at(7) == 1.0);
}

TEST_CASE("competition_ranks shares the better rank on ties") {
    // Values 1.0, 1.0, 2.0 -> ranks 1, 1, 3 (standard competition ranking).
    const std::map<int, double> values = {{0, 1.0}, {1, 1.0}, {2, 2.0}};
    const auto ranks = competition_ranks(values);
    std::map<int, int> by_node;
    for (const auto& [node, rank] : ranks)
        by_node[node] = rank;
    CHECK(by_node.at(0) == 1);
    CHECK(by_node.at(1) == 1);
    CHECK(by_node.at(2) == 3);
}

TEST_CASE("compute_scores blends both quantiles and defaults to the median") {
    round_metrics metrics;
    metrics.time_seconds = {{0, 1.0}, {1, 2.0}, {2, 3.0}}; // ranks 1, 2, 3
    metrics.lsh_distance = {{0, 50}, {1, 10}};             // ranks 2, 1

    const score_map s = compute_scores({0, 1, 2, 3}, metrics, 0.5, 0.5);
    CHECK(s.at(0).phi_time == 1.0);       // fastest of three
    CHECK(s.at(0).phi_distance == 0.0);   // worse of two
    CHECK(s.at(1).phi_distance == 1.0);
    CHECK(s.at(2).phi_time == 0.0);
    // Node 3 was idle: both metrics default to the median quantile.
    CHECK(s.at(3).phi_time == median_quantile);
    CHECK(s.at(3).phi_distance == median_quantile);
    CHECK(s.at(3).s == doctest::Approx(0.5));
    // S = 0.5 * phi1 + 0.5 * phi2.
    CHECK(s.at(0).s == doctest::Approx(0.5 * 1.0 + 0.5 * 0.0));
    CHECK(s.at(1).s == doctest::Approx(0.5 * 0.5 + 0.5 * 1.0));
}

TEST_CASE("alpha weights skew the blend") {
    round_metrics metrics;
    metrics.time_seconds = {{0, 1.0}, {1, 2.0}};
    const score_map s = compute_scores({0, 1}, metrics, 0.9, 0.1);
    CHECK(s.at(0).s == doctest::Approx(0.9 * 1.0 + 0.1 * 0.5));
    CHECK(s.at(1).s == doctest::Approx(0.9 * 0.0 + 0.1 * 0.5));
}

TEST_CASE("build_ring tiles the unit interval in ascending id order") {
    const hash_ring ring = build_ring({{3, 0.2}, {1, 0.6}, {2, 0.2}}, 0);
    REQUIRE(ring.entries.size() == 3);
    CHECK(ring.entries[0].node == 1);
    CHECK(ring.entries[1].node == 2);
    CHECK(ring.entries[2].node == 3);
    CHECK(ring.entries[0].arc_start == 0.0);
    CHECK(ring.entries[0].arc_end == doctest::Approx(0.6));
    CHECK(ring.entries[1].arc_end == doctest::Approx(0.8));
    CHECK(ring.entries[2].arc_end == 1.0); // exact closure
    CHECK_THROWS_AS(build_ring({}, 0), empty_pool);
}

TEST_CASE("zero scores still get the floored sliver") {
    const hash_ring ring = build_ring({{0, 0.0}, {1, 1.0}}, 1);
    const double arc0 = ring.entries[0].arc_end - ring.entries[0].arc_start;
    CHECK(arc0 > 0.0);
    CHECK(arc0 == doctest::Approx(score_floor / (score_floor + 1.0)));
}

TEST_CASE("traversal_start is uniform enough over rounds") {
    // Bucket the start points of 20000 consecutive rounds; every decile
    // should hold roughly 2000.
    int buckets[10] = {0};
    for (uint64_t round = 0; round < 20000; ++round) {
        const double u = traversal_start(round, 99, 0);
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        buckets[static_cast<int>(u * 10)]++;
    }
    for (int c : buckets)
        CHECK(std::abs(c - 2000) < 150);
}

TEST_CASE("traverse collects distinct consecutive nodes from the start arc") {
    const hash_ring ring = build_ring({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}}, 0);
    const std::vector<int> picked = traverse(ring, 4, 7, 3);
    REQUIRE(picked.size() == 3);
    const std::set<int> unique(picked.begin(), picked.end());
    CHECK(unique.size() == 3);
    // Consecutive walk: each pick is the next arc clockwise.
    const int start = picked[0];
    CHECK(picked[1] == (start + 1) % 4);
    CHECK(picked[2] == (start + 2) % 4);

    CHECK_THROWS_AS(traverse(ring, 4, 7, 5), count_exceeds_pool);
}

TEST_CASE("first-round election uses every DN and uniform AGs") {
    const std::vector<int> dns = {0, 1, 2, 3, 4, 5};
    const std::vector<int> pool = {6, 7, 8};
    const election_outcome out = elect_roles(dns, pool, {}, 6, 2, 1, 42);
    CHECK(out.lts == dns); // everyone trains in round 1
    REQUIRE(out.ags.size() == 2);
    for (int ag : out.ags)
        CHECK(std::find(pool.begin(), pool.end(), ag) != pool.end());
    CHECK(out.ags[0] != out.ags[1]);
    CHECK(out.arc_share.empty()); // no ring existed yet
}

TEST_CASE("later rounds traverse score-weighted rings") {
    const std::vector<int> dns = {0, 1, 2, 3, 4, 5, 6, 7};
    const std::vector<int> pool = {8, 9, 10};
    score_map scores;
    for (int n : dns)
        scores[n] = {0.5, 0.5, 0.5};
    for (int n : pool)
        scores[n] = {0.5, 0.5, 0.5};
    scores[3].s = 0.9; // should enlarge node 3's arc

    const election_outcome out = elect_roles(dns, pool, scores, 4, 2, 5, 42);
    REQUIRE(out.lts.size() == 4);
    REQUIRE(out.ags.size() == 2);
    // LTs drawn from DNs only, AGs from the pool only.
    for (int lt : out.lts)
        CHECK(std::find(dns.begin(), dns.end(), lt) != dns.end());
    for (int ag : out.ags)
        CHECK(std::find(pool.begin(), pool.end(), ag) != pool.end());
    // Arc share reflects the floored-normalized scores.
    const double total = 7 * 0.5 + 0.9;
    CHECK(out.arc_share.at(3) == doctest::Approx(0.9 / total));
    CHECK(out.arc_share.at(0) == doctest::Approx(0.5 / total));

    // Deterministic replay.
    const election_outcome again = elect_roles(dns, pool, scores, 4, 2, 5, 42);
    CHECK(again.lts == out.lts);
    CHECK(again.ags == out.ags);
}

TEST_CASE("groups are dealt round-robin over the LT selection order") {
    const std::vector<int> dns = {0, 1, 2, 3, 4, 5, 6, 7};
    const std::vector<int> pool = {8, 9, 10};
    score_map scores;
    for (int n : dns)
        scores[n] = {0.5, 0.5, 0.5};
    for (int n : pool)
        scores[n] = {0.5, 0.5, 0.5};
    const election_outcome out = elect_roles(dns, pool, scores, 5, 2, 9, 7);
    REQUIRE(out.groups.size() == 2);
    CHECK(out.groups[0].size() == 3); // 5 LTs dealt to 2 groups: 3 + 2
    CHECK(out.groups[1].size() == 2);
    for (std::size_t i = 0; i < out.lts.size(); ++i) {
        const auto& g = out.groups[i % 2];
        CHECK(std::find(g.begin(), g.end(), out.lts[i]) != g.end());
    }
}

TEST_CASE("memoryless scoring: only the latest round matters") {
    round_metrics round_a;
    round_a.time_seconds = {{0, 9.0}, {1, 1.0}}; // node 0 slow
    round_metrics round_b;
    round_b.time_seconds = {{0, 1.0}, {1, 9.0}}; // node 0 fast

    const score_map after_a = compute_scores({0, 1}, round_a, 0.5, 0.5);
    const score_map after_b = compute_scores({0, 1}, round_b, 0.5, 0.5);
    // Scores after round B are independent of round A's observations.
    CHECK(after_b.at(0).phi_time == 1.0);
    CHECK(after_b.at(1).phi_time == 0.0);
    CHECK(after_a.at(0).phi_time == 0.0);
    // Recomputing from the same metrics replays identically.
    const score_map replay = compute_scores({0, 1}, round_b, 0.5, 0.5);
    CHECK(replay.at(0).s == after_b.at(0).s);
    CHECK(replay.at(1).s == after_b.at(1).s);
}

TEST_CASE("elections demand enough candidates") {
    const std::vector<int> dns = {0, 1};
    const std::vector<int> pool = {2};
    score_map scores;
    for (int n : {0, 1, 2})
        scores[n] = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(elect_roles(dns, pool, scores, 3, 1, 2, 1), insufficient_pool);
    CHECK_THROWS_AS(elect_roles(dns, pool, scores, 2, 2, 2, 1), insufficient_pool);
}
