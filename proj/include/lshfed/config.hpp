#pragma once

#include <cstdint>
#include <string>

#include "lshfed/learner.hpp"

namespace lshfed {

enum class defense_kind { lshfed, fedavg };

/// Full experiment description. Field defaults are the effective defaults of
/// every CLI run; parse_config_* overrides them from `key = value` lines.
struct experiment_config {
    // Topology. non_dn_count includes the verifier, which is the highest
    // non-DN id and never eligible as an aggregator.
    int dn_count = 10;
    int non_dn_count = 10;
    int lt_count = 5; // Q, LTs elected per round
    int ag_count = 2; // P, AGs (= groups) per round

    // Detection
    int hyperplanes = 8; // r, per matrix
    int filter_rank = 1;
    double distance_threshold = -1.0; // reserved; parsed and echoed, not interpreted

    // Scoring
    double alpha_time = 0.5;
    double alpha_distance = 0.5;

    // Masking
    uint64_t scale = 1ull << 16;
    uint64_t modulus = 1ull << 32;

    // Attack
    attack_kind attack = attack_kind::none;
    double malicious_fraction = 0.0;
    bool collusion = false;
    double noise_std = 1.0;

    // Data
    partition_kind partition = partition_kind::iid;
    double dirichlet_alpha = 0.5;
    int client_samples = 200;
    int vr_samples = 200;
    int test_samples = 1000;
    double blob_scale = 0.5;

    // Model / training
    int model_dim = 128;
    int model_hidden = 128;
    int model_classes = 10;
    double learning_rate = 0.3;
    int local_epochs = 3;

    // Simulated compute time (lognormal parameters)
    double time_log_mu = 0.0;
    double time_log_sigma = 0.25;

    // Run
    int rounds = 50;
    uint64_t seed = 1;
    defense_kind defense = defense_kind::lshfed;

    /// Throws config_error naming the violated constraint.
    void validate() const;

    /// Canonical `key = value` echo of every field, parseable back into an
    /// identical config.
    std::string echo() const;
};

const char* attack_kind_name(attack_kind k);
const char* partition_kind_name(partition_kind k);
const char* defense_kind_name(defense_kind k);

/// Parse a flat key-value config file. Unknown keys, bad values and duplicate
/// keys raise config_error with the offending line number.
experiment_config parse_config_text(const std::string& text, const std::string& origin);
experiment_config parse_config_file(const std::string& path);

} // namespace lshfed
