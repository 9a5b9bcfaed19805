#include "lshfed/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "lshfed/rng.hpp"

namespace lshfed {

namespace {

// Stream domains under the master seed.
constexpr uint64_t kMeansTag = 0x4d454e53;  // class geometry (shared train/test)
constexpr uint64_t kDataTag = 0x44415441;   // dataset generation
constexpr uint64_t kSplitTag = 0x53504c54;  // verifier holdout selection
constexpr uint64_t kPartTag = 0x50415254;   // client partitioning
constexpr uint64_t kTestTag = 0x54455354;   // test set
constexpr uint64_t kModelTag = 0x4d4f444c;  // model init
constexpr uint64_t kPlaneTag = 0x504c4e45;  // hyperplane master seed
constexpr uint64_t kBenchTag = 0x42454e43;  // verifier benchmark training
constexpr uint64_t kChainTag = 0x4348414e;  // per-group mask chains
constexpr uint64_t kTrainTag = 0x5452414e;  // per-node local training
constexpr uint64_t kAttackTag = 0x4154544b; // attack randomness
constexpr uint64_t kTamperTag = 0x54414d50; // mask tampering noise
constexpr uint64_t kTimeTag = 0x54494d45;   // simulated compute time

std::vector<double> skew_weights(int classes) {
    // Two shared primary classes at 35% each; the rest split the remaining
    // 30%. Matches the 70/30 shard composition so partitioning conserves.
    std::vector<double> w(classes, 0.0);
    if (classes <= 2) {
        std::fill(w.begin(), w.end(), 1.0 / classes);
        return w;
    }
    w[0] = 0.35;
    w[1] = 0.35;
    for (int c = 2; c < classes; ++c)
        w[c] = 0.30 / (classes - 2);
    return w;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

} // namespace

simulation::simulation(const experiment_config& cfg)
    : cfg_(cfg), model_(1, 1, 2, 0) // placeholder, replaced below
{
    cfg_.validate();
    master_seed_ = cfg_.seed;

    registry_.register_shape(
        mlp_model::shape_id_of(cfg_.model_dim, cfg_.model_hidden, cfg_.model_classes),
        mlp_model::shape_of(cfg_.model_dim, cfg_.model_hidden, cfg_.model_classes));

    // Topology: DNs are ids [0, dn), non-DNs [dn, dn + non_dn); the verifier
    // is the highest non-DN id and never acts as an aggregator.
    verifier_id_ = cfg_.dn_count + cfg_.non_dn_count - 1;
    nodes_.resize(cfg_.dn_count + cfg_.non_dn_count);
    for (int id = 0; id < static_cast<int>(nodes_.size()); ++id) {
        node_descriptor& n = nodes_[id];
        n.id = id;
        n.is_data_node = id < cfg_.dn_count;
        n.is_verifier = id == verifier_id_;
        n.time_log_mu = cfg_.time_log_mu;
        n.time_log_sigma = cfg_.time_log_sigma;
    }

    // Malicious roles sit at alternating DN ids (0, 2, 4, ...): the
    // dispersed-adversary placement (see README). With an even DN count and
    // two groups, round-robin grouping over consecutive ids makes the groups
    // parity classes, so same-parity adversaries never cover every group.
    const int malicious = static_cast<int>(std::floor(cfg_.malicious_fraction * cfg_.dn_count));
    for (int j = 0; j < malicious; ++j) {
        const int id = (2 * j) % cfg_.dn_count;
        nodes_[id].attack.kind = cfg_.attack;
        nodes_[id].attack.collusion = cfg_.collusion;
        nodes_[id].attack.noise_std = cfg_.noise_std;
    }

    // Data: one pool, verifier holdout drawn first, the rest partitioned
    // across DNs under the configured scheme.
    const std::vector<double> weights =
        cfg_.partition == partition_kind::label_skew ? skew_weights(cfg_.model_classes)
                                                     : std::vector<double>{};
    const int total = cfg_.dn_count * cfg_.client_samples + cfg_.vr_samples;
    const uint64_t means_seed = rng::derive(master_seed_, kMeansTag);
    train_ = make_blob_dataset(total, cfg_.model_dim, cfg_.model_classes, cfg_.blob_scale,
                               means_seed, rng::derive(master_seed_, kDataTag), weights);
    // The test split shares the class geometry but is always balanced, so
    // accuracy is comparable across partition schemes.
    test_ = make_blob_dataset(cfg_.test_samples, cfg_.model_dim, cfg_.model_classes,
                              cfg_.blob_scale, means_seed, rng::derive(master_seed_, kTestTag));

    std::vector<int> order(total);
    std::iota(order.begin(), order.end(), 0);
    const uint64_t split_seed = rng::derive(master_seed_, kSplitTag);
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng::uniform_mod_at(split_seed, i, i));
        std::swap(order[i - 1], order[j]);
    }

    vr_shard_.owner = verifier_id_;
    vr_shard_.ids.assign(order.begin(), order.begin() + cfg_.vr_samples);
    std::sort(vr_shard_.ids.begin(), vr_shard_.ids.end());
    for (int id : vr_shard_.ids)
        vr_shard_.items.push_back(train_.items[id]);

    std::vector<int> pool_ids(order.begin() + cfg_.vr_samples, order.end());
    std::sort(pool_ids.begin(), pool_ids.end());
    dataset client_pool;
    client_pool.dim = train_.dim;
    client_pool.classes = train_.classes;
    client_pool.items.reserve(pool_ids.size());
    for (int id : pool_ids)
        client_pool.items.push_back(train_.items[id]);

    shards_ = make_partitions(client_pool, cfg_.dn_count, cfg_.partition, cfg_.dirichlet_alpha,
                              rng::derive(master_seed_, kPartTag));
    for (auto& shard : shards_) // remap local pool indices to global ids
        for (auto& id : shard.ids)
            id = pool_ids[id];

    // Model, hyperplanes, and the verifier's benchmark sketch.
    model_ = mlp_model(cfg_.model_dim, cfg_.model_hidden, cfg_.model_classes,
                       rng::derive(master_seed_, kModelTag));
    planes_ = generate_hyperplanes(registry_, model_.shape_id(), cfg_.hyperplanes,
                                   rng::derive(master_seed_, kPlaneTag));
    const gradient_update seed_update = local_train(
        model_, vr_shard_, cfg_.local_epochs, cfg_.learning_rate, rng::derive(master_seed_, kBenchTag));
    benchmark_ = project(seed_update, planes_);

    // Initial model broadcast from the verifier to every other node.
    const uint64_t model_bytes = meter(payload{model_.params()});
    for (const auto& n : nodes_)
        if (n.id != verifier_id_)
            bootstrap_messages_.push_back(
                {0, verifier_id_, n.id, payload_kind::model_broadcast, model_bytes});
}

std::vector<int> simulation::dn_ids() const {
    std::vector<int> ids(cfg_.dn_count);
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

std::vector<int> simulation::ag_pool_ids() const {
    std::vector<int> ids;
    for (int id = cfg_.dn_count; id < cfg_.dn_count + cfg_.non_dn_count; ++id)
        if (id != verifier_id_)
            ids.push_back(id);
    return ids;
}

election_outcome simulation::elect(int round_id) {
    return elect_roles(dn_ids(), ag_pool_ids(), scores_, cfg_.lt_count, cfg_.ag_count,
                       static_cast<uint64_t>(round_id), master_seed_);
}

double simulation::draw_time(int round_id, int node_id) const {
    const node_descriptor& n = nodes_[node_id];
    const double z = rng::normal_at(
        rng::derive(master_seed_, kTimeTag, static_cast<uint64_t>(round_id), node_id), 0);
    return std::exp(n.time_log_mu + n.time_log_sigma * z);
}

gradient_update simulation::train_node(int round_id, int node_id) {
    const node_descriptor& node = nodes_[node_id];
    const uint64_t attack_seed =
        node.attack.collusion
            ? rng::derive(master_seed_, kAttackTag, static_cast<uint64_t>(round_id))
            : rng::derive(master_seed_, kAttackTag, static_cast<uint64_t>(round_id), node_id);

    data_shard working = shards_[node_id];
    if (node.attack.kind == attack_kind::label_flip)
        working = apply_attack(node.attack, working, zero_update(registry_, model_.shape_id()),
                               cfg_.model_classes, attack_seed)
                      .first;

    gradient_update update =
        local_train(model_, working, cfg_.local_epochs, cfg_.learning_rate,
                    rng::derive(master_seed_, kTrainTag, static_cast<uint64_t>(round_id), node_id));

    if (node.attack.kind == attack_kind::gaussian_noise)
        update = apply_attack(node.attack, working, update, cfg_.model_classes, attack_seed).second;
    return update;
}

round_transcript simulation::run_round(int round_id) {
    round_transcript tr;
    tr.round_id = round_id;

    const election_outcome outcome = elect(round_id);
    tr.lts = outcome.lts;
    tr.ags = outcome.ags;
    tr.arc_share = outcome.arc_share;

    const bool lsh_defense = cfg_.defense == defense_kind::lshfed;

    std::map<int, gradient_update> aggregate_by_ag;
    std::vector<std::pair<int, bit_string>> candidates;

    for (std::size_t g = 0; g < outcome.groups.size(); ++g) {
        const int ag = outcome.ags[g];
        const std::vector<int>& members = outcome.groups[g];

        candidate_record rec;
        rec.ag = ag;
        rec.group = members;
        for (int m : members)
            rec.contains_malice |= nodes_[m].attack.kind != attack_kind::none;

        if (members.size() < 2) {
            rec.dropped = true;
            rec.drop_reason = "group_too_small";
            tr.candidates.push_back(std::move(rec));
            continue;
        }

        const mask_config mask_cfg =
            make_mask_config(registry_, model_.shape_id(), cfg_.scale, cfg_.modulus, members);
        const auto shares = run_mask_chain(
            mask_cfg, rng::derive(master_seed_, kChainTag, static_cast<uint64_t>(round_id), g));
        const auto masks = masks_by_owner(shares);

        std::vector<fixed_gradient> uploads;
        uploads.reserve(members.size());
        for (int m : members) {
            const gradient_update update = train_node(round_id, m);
            fixed_gradient mask = masks.at(m);
            if (nodes_[m].attack.kind == attack_kind::mask_tamper) {
                // Tampered upload: the node masks with garbage instead of its
                // chain share, leaving an irrecoverable residue in the sum.
                const fixed_gradient junk = uniform_fixed(
                    registry_, model_.shape_id(), cfg_.scale, cfg_.modulus,
                    rng::derive(master_seed_, kTamperTag, static_cast<uint64_t>(round_id), m));
                mask = add_mod(mask, junk);
            }
            fixed_gradient upload = apply_mask(update, mask, mask_cfg);
            tr.messages.push_back({round_id, m, ag, payload_kind::masked_gradient,
                                   meter(payload{upload})});
            uploads.push_back(std::move(upload));
        }

        gradient_update aggregate =
            unmask_aggregate(uploads, mask_cfg, static_cast<int>(members.size()));

        if (lsh_defense) {
            bit_string bits = project(aggregate, planes_);
            tr.messages.push_back(
                {round_id, ag, verifier_id_, payload_kind::bit_string, meter(payload{bits})});
            candidates.emplace_back(ag, std::move(bits));
        } else {
            // No-defense control: the aggregator forwards the full group
            // aggregate to the verifier.
            tr.messages.push_back({round_id, ag, verifier_id_, payload_kind::masked_gradient,
                                   meter(payload{aggregate})});
        }
        aggregate_by_ag.emplace(ag, std::move(aggregate));
        tr.candidates.push_back(std::move(rec));
    }

    // Step 3: verification and model application.
    if (lsh_defense) {
        if (candidates.empty()) {
            tr.no_candidates = true;
        } else {
            const ranking_result ranking =
                rank_candidates(candidates, benchmark_, cfg_.filter_rank);
            std::map<int, int> distance_by_ag;
            for (const auto& rc : ranking.ranked)
                distance_by_ag[rc.node_id] = rc.distance;

            const int winner = ranking.accepted.front();
            tr.winner_ag = winner;
            tr.winner_distance = distance_by_ag.at(winner);

            for (auto& rec : tr.candidates) {
                if (rec.dropped)
                    continue;
                rec.distance = distance_by_ag.at(rec.ag);
                rec.selected = rec.ag == winner;
                if (rec.selected)
                    tr.winner_contains_malice = rec.contains_malice;
                // Everyone who carried the candidate inherits its distance.
                for (int m : rec.group)
                    tr.metrics.lsh_distance[m] = rec.distance;
                tr.metrics.lsh_distance[rec.ag] = rec.distance;
            }

            const notification_payload notice{static_cast<uint64_t>(round_id),
                                              static_cast<uint64_t>(winner)};
            tr.messages.push_back({round_id, verifier_id_, winner, payload_kind::notification,
                                   meter(payload{notice})});
            model_.apply_update(aggregate_by_ag.at(winner));

            const uint64_t model_bytes = meter(payload{model_.params()});
            for (int lt : tr.lts)
                tr.messages.push_back(
                    {round_id, winner, lt, payload_kind::model_broadcast, model_bytes});
            for (int ag : tr.ags)
                if (ag != winner)
                    tr.messages.push_back(
                        {round_id, winner, ag, payload_kind::model_broadcast, model_bytes});

            for (const auto& [ag, bits] : candidates)
                if (ag == winner)
                    benchmark_ = bits;
        }
    } else {
        if (aggregate_by_ag.empty()) {
            tr.no_candidates = true;
        } else {
            // Size-weighted mean over all group aggregates = plain mean over
            // every trainer's update.
            gradient_update global = zero_update(registry_, model_.shape_id());
            double weight = 0.0;
            for (const auto& rec : tr.candidates) {
                if (rec.dropped)
                    continue;
                const double k = static_cast<double>(rec.group.size());
                global = add(global, scaled(aggregate_by_ag.at(rec.ag), k));
                weight += k;
            }
            model_.apply_update(scaled(global, 1.0 / weight));
            const uint64_t model_bytes = meter(payload{model_.params()});
            for (int lt : tr.lts)
                tr.messages.push_back(
                    {round_id, verifier_id_, lt, payload_kind::model_broadcast, model_bytes});
            for (int ag : tr.ags)
                tr.messages.push_back(
                    {round_id, verifier_id_, ag, payload_kind::model_broadcast, model_bytes});
        }
    }

    // Step 4: time reports and memoryless re-scoring.
    std::vector<int> active = tr.lts;
    active.insert(active.end(), tr.ags.begin(), tr.ags.end());
    std::sort(active.begin(), active.end());
    for (int node : active) {
        const double seconds = draw_time(round_id, node);
        tr.metrics.time_seconds[node] = seconds;
        const score_report_payload rep{static_cast<uint64_t>(round_id),
                                       static_cast<uint64_t>(node), seconds};
        tr.messages.push_back(
            {round_id, node, verifier_id_, payload_kind::score_report, meter(payload{rep})});
    }

    std::vector<int> scored_nodes;
    for (const auto& n : nodes_)
        if (!n.is_verifier)
            scored_nodes.push_back(n.id);
    scores_ = compute_scores(scored_nodes, tr.metrics, cfg_.alpha_time, cfg_.alpha_distance);
    tr.scores = scores_;

    tr.accuracy = evaluate(model_, test_);
    return tr;
}

experiment_report run_experiment(const experiment_config& cfg) {
    simulation sim(cfg);

    experiment_report report;
    report.cfg = sim.config();
    report.rounds.reserve(cfg.rounds);
    for (int t = 1; t <= cfg.rounds; ++t)
        report.rounds.push_back(sim.run_round(t));

    const auto& bootstrap = sim.bootstrap_messages();
    report.bootstrap_messages = bootstrap;

    auto add_bytes = [&report](const message_record& m) {
        report.bytes_by_kind[m.kind] += m.bytes;
    };
    for (const auto& m : bootstrap)
        add_bytes(m);

    const uint64_t full_gradient_bytes =
        gradient_wire_size(sim.shapes().lookup(sim.model().shape_id()));

    long long tp = 0, fp = 0, fn = 0;
    for (const auto& round : report.rounds) {
        for (const auto& m : round.messages) {
            add_bytes(m);
            if (m.receiver == sim.verifier_id() &&
                (m.kind == payload_kind::bit_string || m.kind == payload_kind::masked_gradient)) {
                report.verification_bytes += m.bytes;
                report.hypothetical_full_bytes += full_gradient_bytes;
            }
        }
        for (const auto& rec : round.candidates) {
            if (rec.dropped || rec.distance < 0)
                continue;
            if (rec.contains_malice)
                report.has_malice_ground_truth = true;
            const bool flagged = !rec.selected;
            if (flagged && rec.contains_malice)
                ++tp;
            else if (flagged && !rec.contains_malice)
                ++fp;
            else if (!flagged && rec.contains_malice)
                ++fn;
        }
    }
    report.verification_ratio =
        report.hypothetical_full_bytes > 0
            ? static_cast<double>(report.verification_bytes) /
                  static_cast<double>(report.hypothetical_full_bytes)
            : 0.0;
    report.detection_precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 1.0;
    report.detection_recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 1.0;

    const int tail = std::min<int>(10, static_cast<int>(report.rounds.size()));
    double acc = 0.0;
    for (int i = 0; i < tail; ++i)
        acc += report.rounds[report.rounds.size() - 1 - i].accuracy;
    report.final_accuracy = tail > 0 ? acc / tail : 0.0;
    return report;
}

std::string transcript_csv(const experiment_report& report) {
    std::ostringstream out;
    out << "round,sender,receiver,payload_kind,bytes\n";
    auto emit = [&out](const message_record& m) {
        out << m.round << ',' << m.sender << ',' << m.receiver << ','
            << payload_kind_name(m.kind) << ',' << m.bytes << '\n';
    };
    for (const auto& m : report.bootstrap_messages)
        emit(m);
    for (const auto& round : report.rounds)
        for (const auto& m : round.messages)
            emit(m);
    return out.str();
}

std::string metrics_csv(const experiment_report& report) {
    std::ostringstream out;
    out << "round,accuracy,winner_ag,winner_distance,winner_contains_malice,candidates,"
           "dropped_groups,min_distance,max_distance,bytes_model_broadcast,"
           "bytes_masked_gradient,bytes_bit_string,bytes_notification,bytes_score_report\n";
    for (const auto& round : report.rounds) {
        int candidates = 0, dropped = 0, min_d = -1, max_d = -1;
        std::map<payload_kind, uint64_t> bytes;
        for (const auto& rec : round.candidates) {
            if (rec.dropped) {
                ++dropped;
                continue;
            }
            ++candidates;
            if (rec.distance >= 0) {
                min_d = min_d < 0 ? rec.distance : std::min(min_d, rec.distance);
                max_d = max_d < 0 ? rec.distance : std::max(max_d, rec.distance);
            }
        }
        for (const auto& m : round.messages)
            bytes[m.kind] += m.bytes;
        out << round.round_id << ',' << fmt_fixed(round.accuracy, 6) << ',' << round.winner_ag
            << ',' << round.winner_distance << ',' << (round.winner_contains_malice ? 1 : 0)
            << ',' << candidates << ',' << dropped << ',' << min_d << ',' << max_d << ','
            << bytes[payload_kind::model_broadcast] << ',' << bytes[payload_kind::masked_gradient]
            << ',' << bytes[payload_kind::bit_string] << ',' << bytes[payload_kind::notification]
            << ',' << bytes[payload_kind::score_report] << '\n';
    }
    return out.str();
}

std::string elections_csv(const experiment_report& report) {
    std::ostringstream out;
    out << "round,node_id,role,s,p,selected\n";
    // Scores consumed by round t's election are the ones recomputed at the
    // end of round t-1; round 1 consumed the defaults.
    const score_map empty;
    for (std::size_t i = 0; i < report.rounds.size(); ++i) {
        const auto& round = report.rounds[i];
        const score_map& consumed = i == 0 ? empty : report.rounds[i - 1].scores;

        std::vector<int> nodes; // scores cover every non-verifier node
        for (const auto& entry : round.scores)
            nodes.push_back(entry.first);
        std::sort(nodes.begin(), nodes.end());

        const bool round_one = round.round_id <= 1;
        for (int node : nodes) {
            const char* role = "idle";
            if (std::find(round.lts.begin(), round.lts.end(), node) != round.lts.end())
                role = "lt";
            else if (std::find(round.ags.begin(), round.ags.end(), node) != round.ags.end())
                role = "ag";
            double s = median_quantile;
            if (const auto it = consumed.find(node); it != consumed.end())
                s = it->second.s;
            double p = 0.0;
            if (const auto it = round.arc_share.find(node); it != round.arc_share.end())
                p = it->second;
            else if (round_one)
                p = -1.0; // uniform first-round rule: no ring existed
            const bool selected = std::string(role) != "idle";
            out << round.round_id << ',' << node << ',' << role << ',' << fmt_fixed(s, 9) << ','
                << fmt_fixed(p, 9) << ',' << (selected ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

std::string summary_text(const experiment_report& report) {
    std::ostringstream out;
    out << "# effective-config\n" << report.cfg.echo() << "\n# results\n";
    out << "rounds_run = " << report.rounds.size() << "\n";
    out << "final_accuracy = " << fmt_fixed(report.final_accuracy, 6) << "\n";
    out << "verification_bytes = " << report.verification_bytes << "\n";
    out << "hypothetical_full_gradient_bytes = " << report.hypothetical_full_bytes << "\n";
    out << "verification_ratio = " << fmt_double(report.verification_ratio) << "\n";
    if (report.has_malice_ground_truth) {
        out << "detection_precision = " << fmt_fixed(report.detection_precision, 6) << "\n";
        out << "detection_recall = " << fmt_fixed(report.detection_recall, 6) << "\n";
    } else {
        out << "detection_precision = n/a\n";
        out << "detection_recall = n/a\n";
    }
    const payload_kind kinds[] = {payload_kind::model_broadcast, payload_kind::masked_gradient,
                                  payload_kind::bit_string, payload_kind::notification,
                                  payload_kind::score_report};
    for (payload_kind k : kinds) {
        uint64_t v = 0;
        if (const auto it = report.bytes_by_kind.find(k); it != report.bytes_by_kind.end())
            v = it->second;
        out << "bytes_" << payload_kind_name(k) << " = " << v << "\n";
    }
    return out.str();
}

} // namespace lshfed
