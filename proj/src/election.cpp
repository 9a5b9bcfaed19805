#include "lshfed/election.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "lshfed/rng.hpp"

namespace lshfed {

std::map<int, double> quantile_score(const std::vector<std::pair<int, int>>& rankings) {
    std::map<int, double> out;
    if (rankings.empty())
        return out;
    const double big_r = static_cast<double>(rankings.size());
    if (rankings.size() == 1) {
        out[rankings[0].first] = 1.0; // degenerate single-node pool
        return out;
    }
    for (const auto& [node, rank] : rankings)
        out[node] = (big_r - static_cast<double>(rank)) / (big_r - 1.0);
    return out;
}

namespace {

// Competition ranking: rank = 1 + number of strictly better (smaller) values,
// so ties share the better rank.
template <typename T>
std::vector<std::pair<int, int>> ranks_of(const std::map<int, T>& values) {
    std::vector<std::pair<int, int>> out;
    out.reserve(values.size());
    for (const auto& entry : values) {
        int rank = 1;
        for (const auto& other : values)
            if (other.second < entry.second)
                ++rank;
        out.emplace_back(entry.first, rank);
    }
    return out;
}

} // namespace

std::vector<std::pair<int, int>> competition_ranks(const std::map<int, double>& values) {
    return ranks_of(values);
}

std::vector<std::pair<int, int>> competition_ranks(const std::map<int, int>& values) {
    return ranks_of(values);
}

score_map compute_scores(const std::vector<int>& nodes, const round_metrics& metrics,
                         double alpha_time, double alpha_distance) {
    const auto time_quantiles = quantile_score(competition_ranks(metrics.time_seconds));
    const auto dist_quantiles = quantile_score(competition_ranks(metrics.lsh_distance));

    score_map scores;
    for (int node : nodes) {
        node_score s;
        if (auto it = time_quantiles.find(node); it != time_quantiles.end())
            s.phi_time = it->second;
        if (auto it = dist_quantiles.find(node); it != dist_quantiles.end())
            s.phi_distance = it->second;
        s.s = alpha_time * s.phi_time + alpha_distance * s.phi_distance;
        scores[node] = s;
    }
    return scores;
}

hash_ring build_ring(const std::vector<std::pair<int, double>>& pool, uint8_t pool_tag) {
    if (pool.empty())
        throw empty_pool("cannot build a hash ring from an empty pool");

    std::vector<std::pair<int, double>> sorted = pool;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    double total = 0.0;
    for (auto& [node, s] : sorted) {
        s = std::max(s, score_floor);
        total += s;
    }

    hash_ring ring;
    ring.pool_tag = pool_tag;
    ring.entries.reserve(sorted.size());
    double cursor = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        ring_entry e;
        e.node = sorted[i].first;
        e.arc_start = cursor;
        cursor = (i + 1 == sorted.size()) ? 1.0 : cursor + sorted[i].second / total;
        e.arc_end = cursor;
        ring.entries.push_back(e);
    }
    return ring;
}

double traversal_start(uint64_t round_id, uint64_t seed, uint8_t pool_tag) {
    std::array<uint8_t, 17> bytes{};
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<uint8_t>((round_id >> (8 * i)) & 0xff);
    for (int i = 0; i < 8; ++i)
        bytes[8 + i] = static_cast<uint8_t>((seed >> (8 * i)) & 0xff);
    bytes[16] = pool_tag;
    return static_cast<double>(rng::hash64(bytes.data(), bytes.size())) * 0x1.0p-64;
}

std::vector<int> traverse(const hash_ring& ring, uint64_t round_id, uint64_t seed, int count) {
    if (count < 0 || static_cast<std::size_t>(count) > ring.entries.size())
        throw count_exceeds_pool("requested " + std::to_string(count) + " nodes from a ring of " +
                                 std::to_string(ring.entries.size()));

    const double h0 = traversal_start(round_id, seed, ring.pool_tag);
    // Arc containing h0: last entry whose start is <= h0.
    std::size_t start = 0;
    for (std::size_t i = 0; i < ring.entries.size(); ++i)
        if (ring.entries[i].arc_start <= h0 && h0 < ring.entries[i].arc_end)
            start = i;

    std::vector<int> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(ring.entries[(start + i) % ring.entries.size()].node);
    return out;
}

election_outcome elect_roles(const std::vector<int>& dns, const std::vector<int>& non_dns,
                             const score_map& scores, int lt_count, int ag_count,
                             uint64_t round_id, uint64_t seed) {
    if (dns.empty() || non_dns.empty())
        throw insufficient_pool("both node pools must be non-empty");
    if (lt_count > static_cast<int>(dns.size()))
        throw insufficient_pool("more learning trainers requested than data nodes");
    if (ag_count > static_cast<int>(non_dns.size()))
        throw insufficient_pool("more aggregators requested than eligible non-data nodes");
    if (lt_count < 1 || ag_count < 1)
        throw insufficient_pool("role counts must be >= 1");

    election_outcome outcome;

    if (round_id <= 1) {
        // First round: every DN trains; AGs drawn uniformly (seeded shuffle).
        outcome.lts = dns;
        std::sort(outcome.lts.begin(), outcome.lts.end());
        std::vector<int> pool = non_dns;
        std::sort(pool.begin(), pool.end());
        const uint64_t shuffle_seed = rng::derive(seed, 0x52314147ull, round_id);
        for (std::size_t i = pool.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng::uniform_mod_at(shuffle_seed, i, i));
            std::swap(pool[i - 1], pool[j]);
        }
        outcome.ags.assign(pool.begin(), pool.begin() + ag_count);
    } else {
        auto pool_scores = [&scores](const std::vector<int>& ids) {
            std::vector<std::pair<int, double>> pool;
            pool.reserve(ids.size());
            for (int id : ids) {
                const auto it = scores.find(id);
                pool.emplace_back(id, it == scores.end() ? median_quantile : it->second.s);
            }
            return pool;
        };
        const hash_ring dn_ring = build_ring(pool_scores(dns), 0);
        const hash_ring ag_ring = build_ring(pool_scores(non_dns), 1);
        outcome.lts = traverse(dn_ring, round_id, seed, lt_count);
        outcome.ags = traverse(ag_ring, round_id, seed, ag_count);
        for (const auto& e : dn_ring.entries)
            outcome.arc_share[e.node] = e.arc_end - e.arc_start;
        for (const auto& e : ag_ring.entries)
            outcome.arc_share[e.node] = e.arc_end - e.arc_start;
    }

    // Groups are decided by selection order, dealt round-robin.
    outcome.groups.assign(ag_count, {});
    for (std::size_t i = 0; i < outcome.lts.size(); ++i)
        outcome.groups[i % ag_count].push_back(outcome.lts[i]);
    return outcome;
}

} // namespace lshfed
