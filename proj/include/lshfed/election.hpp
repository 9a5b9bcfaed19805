#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lshfed/errors.hpp"

namespace lshfed {

/// Scores below this floor still get a sliver of the ring, so no node's
/// selection probability is exactly zero.
inline constexpr double score_floor = 1e-3;
/// Default quantile for nodes that produced no usable metric this round.
inline constexpr double median_quantile = 0.5;

/// Raw per-round observations the verifier scores from. Only nodes that were
/// active appear in time_seconds; only nodes whose group produced a ranked
/// candidate appear in lsh_distance.
struct round_metrics {
    std::map<int, double> time_seconds;
    std::map<int, int> lsh_distance;
};

struct node_score {
    double phi_time = median_quantile;
    double phi_distance = median_quantile;
    double s = 0.0;
};

using score_map = std::map<int, node_score>;

/// Affine quantile (R - r) / (R - 1) for ranks r in 1..R. A single-entry
/// pool is degenerate and scores 1.0.
std::map<int, double> quantile_score(const std::vector<std::pair<int, int>>& rankings);

/// Competition ranks (ties share the better rank) for ascending metric values
/// ("smaller is better": shorter time, smaller distance).
std::vector<std::pair<int, int>> competition_ranks(const std::map<int, double>& values);
std::vector<std::pair<int, int>> competition_ranks(const std::map<int, int>& values);

/// Memoryless reputation: S(i) = alpha_time * phi1 + alpha_distance * phi2
/// computed from this round's metrics alone. Every node in `nodes` receives
/// a score; missing metrics default to the median quantile.
score_map compute_scores(const std::vector<int>& nodes, const round_metrics& metrics,
                         double alpha_time, double alpha_distance);

struct ring_entry {
    int node = -1;
    double arc_start = 0.0;
    double arc_end = 0.0; // half-open [start, end)
};

/// Arcs tile [0, 1) in ascending node-id order with lengths proportional to
/// floored scores.
struct hash_ring {
    std::vector<ring_entry> entries;
    uint8_t pool_tag = 0;
};

/// Build a ring from (node, S) pairs; scores are floored at score_floor then
/// normalized. Throws empty_pool on an empty pool.
hash_ring build_ring(const std::vector<std::pair<int, double>>& pool, uint8_t pool_tag);

/// Traversal start in [0, 1): hash64 of round_id (8-byte LE) ‖ seed
/// (8-byte LE) ‖ pool_tag (1 byte), normalized by 2^64.
double traversal_start(uint64_t round_id, uint64_t seed, uint8_t pool_tag);

/// From the arc containing the start point, walk clockwise collecting
/// distinct node ids until `count` are gathered. Throws count_exceeds_pool.
std::vector<int> traverse(const hash_ring& ring, uint64_t round_id, uint64_t seed, int count);

struct election_outcome {
    std::vector<int> lts;                 // selection order
    std::vector<int> ags;                 // one per group
    std::vector<std::vector<int>> groups; // groups[g] lists LT ids, selection order
    // Arc share per node in its pool's ring (empty for round 1).
    std::map<int, double> arc_share;
};

/// ScoreQ-Hash role election. Round 1: every DN is an LT and AGs are drawn
/// uniformly (seeded shuffle); later rounds traverse two independent rings.
/// Groups are formed round-robin over the LT selection order. The VR must
/// not appear in either pool. Throws insufficient_pool when a pool cannot
/// supply the requested count.
election_outcome elect_roles(const std::vector<int>& dns, const std::vector<int>& non_dns,
                             const score_map& scores, int lt_count, int ag_count,
                             uint64_t round_id, uint64_t seed);

} // namespace lshfed
