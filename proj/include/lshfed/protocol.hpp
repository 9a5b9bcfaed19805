#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lshfed/config.hpp"
#include "lshfed/election.hpp"
#include "lshfed/learner.hpp"
#include "lshfed/lshgm.hpp"
#include "lshfed/masking.hpp"
#include "lshfed/wire.hpp"

namespace lshfed {

struct node_descriptor {
    int id = -1;
    bool is_data_node = false;
    bool is_verifier = false;
    attack_spec attack; // kind none for honest nodes
    double time_log_mu = 0.0;
    double time_log_sigma = 0.25;
};

struct message_record {
    int round = 0;
    int sender = -1;
    int receiver = -1;
    payload_kind kind = payload_kind::notification;
    uint64_t bytes = 0;
};

struct candidate_record {
    int ag = -1;
    std::vector<int> group; // LT ids, selection order
    bool dropped = false;
    std::string drop_reason;
    int distance = -1; // -1 when dropped or defense == fedavg
    bool contains_malice = false;
    bool selected = false;
};

struct round_transcript {
    int round_id = 0;
    std::vector<int> lts;
    std::vector<int> ags;
    std::vector<candidate_record> candidates;
    std::vector<message_record> messages;
    bool no_candidates = false;
    int winner_ag = -1;
    int winner_distance = -1;
    bool winner_contains_malice = false;
    double accuracy = 0.0;
    round_metrics metrics;   // feeds next round's scores
    score_map scores;        // S(i) recomputed at round end
    std::map<int, double> arc_share; // arc lengths used for this round's election
};

/// Whole-protocol simulator: bootstrap in the constructor (model init, data
/// partitioning, hyperplane generation, verifier benchmark), then one
/// transcript per run_round call. Deterministic: identical config + seed
/// give identical state and transcripts.
class simulation {
public:
    explicit simulation(const experiment_config& cfg);

    round_transcript run_round(int round_id);

    const experiment_config& config() const { return cfg_; }
    const std::vector<node_descriptor>& nodes() const { return nodes_; }
    int verifier_id() const { return verifier_id_; }
    std::vector<int> dn_ids() const;
    std::vector<int> ag_pool_ids() const; // non-DNs minus the verifier
    const bit_string& benchmark() const { return benchmark_; }
    const mlp_model& model() const { return model_; }
    const shape_registry& shapes() const { return registry_; }
    const hyperplane_set& hyperplanes() const { return planes_; }
    const score_map& scores() const { return scores_; }
    const dataset& test_set() const { return test_; }
    const std::vector<data_shard>& shards() const { return shards_; }
    const data_shard& verifier_shard() const { return vr_shard_; }
    /// Initial model broadcast, recorded as round 0.
    const std::vector<message_record>& bootstrap_messages() const { return bootstrap_messages_; }

private:
    election_outcome elect(int round_id);
    double draw_time(int round_id, int node_id) const;
    gradient_update train_node(int round_id, int node_id);

    experiment_config cfg_;
    shape_registry registry_;
    std::vector<node_descriptor> nodes_;
    int verifier_id_ = -1;
    dataset train_;
    dataset test_;
    std::vector<data_shard> shards_; // indexed by DN id
    data_shard vr_shard_;
    mlp_model model_;
    hyperplane_set planes_;
    bit_string benchmark_;
    score_map scores_; // from the previous round
    uint64_t master_seed_ = 0;
    std::vector<message_record> bootstrap_messages_;
};

struct experiment_report {
    experiment_config cfg;
    std::vector<message_record> bootstrap_messages; // round 0 rows
    std::vector<round_transcript> rounds;
    double final_accuracy = 0.0; // mean accuracy over the last 10 rounds
    std::map<payload_kind, uint64_t> bytes_by_kind;
    uint64_t verification_bytes = 0;            // AG -> VR verification traffic
    uint64_t hypothetical_full_bytes = 0;       // same messages carrying full gradients
    double verification_ratio = 0.0;
    // Detection quality over candidate groups (flagged = not accepted;
    // positive = contains a malicious LT). has_malice_ground_truth is false
    // when no malicious-containing candidate ever appeared.
    bool has_malice_ground_truth = false;
    double detection_precision = 0.0;
    double detection_recall = 0.0;
};

experiment_report run_experiment(const experiment_config& cfg);

/// CSV / text renderings with fixed headers (documented in the README).
std::string transcript_csv(const experiment_report& report);
std::string metrics_csv(const experiment_report& report);
std::string elections_csv(const experiment_report& report);
std::string summary_text(const experiment_report& report);

} // namespace lshfed
