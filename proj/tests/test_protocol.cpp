#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lshfed/protocol.hpp"

using namespace lshfed;

namespace {

// Small topology that keeps the integration tests fast: 6 DNs, 3 aggregator
// candidates plus the verifier, groups of two.
experiment_config small_config() {
    experiment_config cfg;
    cfg.dn_count = 6;
    cfg.non_dn_count = 4;
    cfg.lt_count = 4;
    cfg.ag_count = 2;
    cfg.model_dim = 16;
    cfg.model_hidden = 8;
    cfg.model_classes = 4;
    cfg.client_samples = 40;
    cfg.vr_samples = 40;
    cfg.test_samples = 200;
    cfg.rounds = 6;
    cfg.seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("bootstrap lays out roles, data and the benchmark") {
    const experiment_config cfg = small_config();
    simulation sim(cfg);

    CHECK(sim.verifier_id() == 9); // highest non-DN id
    REQUIRE(sim.nodes().size() == 10);
    for (const auto& n : sim.nodes()) {
        CHECK(n.is_data_node == (n.id < 6));
        CHECK(n.is_verifier == (n.id == 9));
    }
    CHECK(sim.dn_ids() == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK(sim.ag_pool_ids() == std::vector<int>{6, 7, 8});

    // Shards cover disjoint global ids, and the verifier holdout is disjoint
    // from all of them.
    std::set<int> seen(sim.verifier_shard().ids.begin(), sim.verifier_shard().ids.end());
    CHECK(seen.size() == 40);
    std::size_t client_total = 0;
    for (const auto& shard : sim.shards()) {
        client_total += shard.ids.size();
        for (int id : shard.ids)
            CHECK(seen.insert(id).second);
    }
    CHECK(client_total == 6 * 40);
    CHECK(seen.size() == 7 * 40);

    // The benchmark sketch has the canonical length: hyperplanes * total
    // matrix columns (16x8, 8x1, 8x4, 4x1 -> 8 + 1 + 4 + 1 = 14 columns).
    CHECK(sim.benchmark().bit_length() == cfg.hyperplanes * 14);

    // Bootstrap = one model broadcast to every other node, tagged round 0.
    REQUIRE(sim.bootstrap_messages().size() == 9);
    for (const auto& m : sim.bootstrap_messages()) {
        CHECK(m.round == 0);
        CHECK(m.sender == 9);
        CHECK(m.kind == payload_kind::model_broadcast);
        CHECK(m.bytes > 0);
    }
}

TEST_CASE("malicious nodes occupy alternating data-node ids") {
    experiment_config cfg = small_config();
    cfg.attack = attack_kind::label_flip;
    cfg.malicious_fraction = 0.5;
    const simulation sim(cfg);
    std::vector<int> malicious;
    for (const auto& n : sim.nodes())
        if (n.attack.kind != attack_kind::none)
            malicious.push_back(n.id);
    CHECK(malicious == std::vector<int>{0, 2, 4});
}

TEST_CASE("round transcripts are structurally sound") {
    const experiment_config cfg = small_config();
    simulation sim(cfg);
    const round_transcript tr = sim.run_round(1);

    CHECK(tr.round_id == 1);
    CHECK(tr.lts.size() == 6); // first round: every DN trains
    CHECK(tr.ags.size() == 2);
    REQUIRE(tr.candidates.size() == 2);
    CHECK(tr.winner_ag != -1);
    CHECK(tr.accuracy > 0.0);

    int uploads = 0, sketches = 0, notices = 0, reports = 0;
    for (const auto& m : tr.messages) {
        CHECK(m.round == 1);
        CHECK(m.sender >= 0);
        CHECK(m.sender < 10);
        CHECK(m.receiver >= 0);
        CHECK(m.receiver < 10);
        CHECK(m.sender != m.receiver);
        switch (m.kind) {
        case payload_kind::masked_gradient: uploads++; break;
        case payload_kind::bit_string: sketches++; break;
        case payload_kind::notification: notices++; break;
        case payload_kind::score_report: reports++; break;
        case payload_kind::model_broadcast: break;
        }
    }
    CHECK(uploads == 6);  // every LT uploads exactly once
    CHECK(sketches == 2); // one per group
    CHECK(notices == 1);  // the winner's notice
    CHECK(reports == 8);  // all active nodes report compute time

    // Scores exist for every non-verifier node after the round.
    CHECK(tr.scores.size() == 9);
    // Winner's group members carry the winner's distance in the metrics.
    for (const auto& rec : tr.candidates)
        if (rec.selected)
            for (int member : rec.group)
                CHECK(tr.metrics.lsh_distance.at(member) == tr.winner_distance);
}

TEST_CASE("verification leg carries sketches, not gradients") {
    const experiment_config cfg = small_config();
    simulation sim(cfg);
    const round_transcript tr = sim.run_round(1);
    const uint64_t sketch_bytes = bit_string_wire_size(sim.benchmark().bit_length());
    for (const auto& m : tr.messages)
        if (m.kind == payload_kind::bit_string) {
            CHECK(m.receiver == sim.verifier_id());
            CHECK(m.bytes == sketch_bytes);
        }
}

TEST_CASE("fedavg control swaps sketches for full aggregates and skips selection") {
    experiment_config cfg = small_config();
    cfg.defense = defense_kind::fedavg;
    const experiment_report report = run_experiment(cfg);
    for (const auto& round : report.rounds) {
        CHECK(round.winner_ag == -1);
        for (const auto& rec : round.candidates) {
            CHECK(rec.distance == -1);
            CHECK(!rec.selected);
        }
        int to_verifier = 0;
        for (const auto& m : round.messages) {
            CHECK(m.kind != payload_kind::bit_string);
            CHECK(m.kind != payload_kind::notification);
            if (m.kind == payload_kind::masked_gradient && m.receiver == 9)
                to_verifier++;
        }
        CHECK(to_verifier == 2); // one aggregate per group
    }
    CHECK(report.bytes_by_kind.count(payload_kind::bit_string) == 0);
    CHECK(report.final_accuracy > 0.5); // no attack: the control still learns
}

TEST_CASE("experiments are deterministic end to end") {
    const experiment_config cfg = small_config();
    const experiment_report a = run_experiment(cfg);
    const experiment_report b = run_experiment(cfg);
    CHECK(transcript_csv(a) == transcript_csv(b));
    CHECK(metrics_csv(a) == metrics_csv(b));
    CHECK(elections_csv(a) == elections_csv(b));
    CHECK(summary_text(a) == summary_text(b));

    experiment_config other = cfg;
    other.seed = cfg.seed + 1;
    const experiment_report c = run_experiment(other);
    CHECK(transcript_csv(a) != transcript_csv(c));
}

TEST_CASE("tampered groups are flagged and never win") {
    experiment_config cfg = small_config();
    cfg.attack = attack_kind::mask_tamper;
    cfg.malicious_fraction = 0.17; // one tamperer (node 0)
    cfg.rounds = 12;
    const experiment_report report = run_experiment(cfg);

    int tampered_candidates = 0;
    for (const auto& round : report.rounds) {
        CHECK(!round.winner_contains_malice);
        for (const auto& rec : round.candidates)
            if (rec.contains_malice && !rec.dropped) {
                tampered_candidates++;
                CHECK(!rec.selected);
                // A wrecked aggregate sketches near-uniform bits: its distance
                // sits far above the honest group's.
                CHECK(rec.distance > 0);
            }
    }
    CHECK(tampered_candidates > 0);
    CHECK(report.has_malice_ground_truth);
    CHECK(report.detection_recall == 1.0);
}

TEST_CASE("report aggregates match the transcript") {
    const experiment_config cfg = small_config();
    const experiment_report report = run_experiment(cfg);

    std::map<payload_kind, uint64_t> bytes;
    for (const auto& m : report.bootstrap_messages)
        bytes[m.kind] += m.bytes;
    uint64_t verification = 0;
    int verification_messages = 0;
    for (const auto& round : report.rounds)
        for (const auto& m : round.messages) {
            bytes[m.kind] += m.bytes;
            if (m.kind == payload_kind::bit_string) {
                verification += m.bytes;
                verification_messages++;
            }
        }
    for (const auto& [kind, total] : bytes)
        CHECK(report.bytes_by_kind.at(kind) == total);
    CHECK(report.verification_bytes == verification);

    // The hypothetical counterpart prices the same messages at the full
    // gradient size.
    const uint64_t full =
        gradient_wire_size(mlp_model::shape_of(cfg.model_dim, cfg.model_hidden,
                                               cfg.model_classes));
    CHECK(report.hypothetical_full_bytes == verification_messages * full);
    CHECK(report.verification_ratio ==
          doctest::Approx(static_cast<double>(verification) /
                          static_cast<double>(verification_messages * full)));

    // Final accuracy averages the last (up to) 10 rounds.
    double tail = 0.0;
    const int n = std::min<int>(10, static_cast<int>(report.rounds.size()));
    for (int i = 0; i < n; ++i)
        tail += report.rounds[report.rounds.size() - 1 - i].accuracy;
    CHECK(report.final_accuracy == doctest::Approx(tail / n));
}

TEST_CASE("csv renderings have the documented headers and row counts") {
    experiment_config cfg = small_config();
    cfg.rounds = 3;
    const experiment_report report = run_experiment(cfg);

    const std::string tr = transcript_csv(report);
    CHECK(tr.rfind("round,sender,receiver,payload_kind,bytes\n", 0) == 0);

    const std::string me = metrics_csv(report);
    CHECK(me.rfind("round,accuracy,winner_ag,winner_distance,", 0) == 0);
    CHECK(std::count(me.begin(), me.end(), '\n') == 1 + 3); // header + rounds

    const std::string el = elections_csv(report);
    CHECK(el.rfind("round,node_id,role,s,p,selected\n", 0) == 0);
    CHECK(std::count(el.begin(), el.end(), '\n') == 1 + 3 * 9); // per node rows

    const std::string su = summary_text(report);
    CHECK(su.find("final_accuracy = ") != std::string::npos);
    CHECK(su.find("verification_ratio = ") != std::string::npos);
    CHECK(su.find("rounds = 3") != std::string::npos);
}

TEST_CASE("scores in the transcript replay from the round metrics") {
    const experiment_config cfg = small_config();
    simulation sim(cfg);
    const round_transcript tr = sim.run_round(1);
    std::vector<int> nodes;
    for (const auto& n : sim.nodes())
        if (!n.is_verifier)
            nodes.push_back(n.id);
    const score_map replay =
        compute_scores(nodes, tr.metrics, cfg.alpha_time, cfg.alpha_distance);
    REQUIRE(replay.size() == tr.scores.size());
    for (const auto& [node, score] : tr.scores) {
        CHECK(replay.at(node).s == score.s);
        CHECK(replay.at(node).phi_time == score.phi_time);
        CHECK(replay.at(node).phi_distance == score.phi_distance);
    }
}

TEST_CASE("later rounds elect via the rings with arc shares exposed") {
    const experiment_config cfg = small_config();
    simulation sim(cfg);
    sim.run_round(1);
    const round_transcript tr2 = sim.run_round(2);
    CHECK(tr2.lts.size() == 4); // lt_count once past round 1
    CHECK(tr2.ags.size() == 2);
    CHECK(!tr2.arc_share.empty());
    double dn_share = 0.0, pool_share = 0.0;
    for (const auto& [node, share] : tr2.arc_share) {
        CHECK(share > 0.0);
        if (node < 6)
            dn_share += share;
        else
            pool_share += share;
    }
    CHECK(dn_share == doctest::Approx(1.0));   // DN ring tiles [0, 1)
    CHECK(pool_share == doctest::Approx(1.0)); // pool ring too
}
