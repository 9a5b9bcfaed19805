#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lshfed/tensor.hpp"

namespace lshfed {

struct example {
    std::vector<double> x;
    int label = 0;
};

struct dataset {
    int dim = 0;
    int classes = 0;
    std::vector<example> items;
};

/// A node's slice of the data. Keeps both the owning copy of the examples and
/// their global ids so disjointness is checkable.
struct data_shard {
    int owner = -1;
    std::vector<int> ids; // indices into the source dataset
    std::vector<example> items;
};

/// Gaussian blobs: class means have i.i.d. N(0, mean_scale^2) entries,
/// examples add unit noise. Class geometry is fixed by means_seed alone, so
/// train and test splits drawn with different sample_seeds share the same
/// underlying task. class_weights (optional, sums to 1) skews the label
/// distribution; empty means balanced.
dataset make_blob_dataset(int count, int dim, int classes, double mean_scale,
                          uint64_t means_seed, uint64_t sample_seed,
                          const std::vector<double>& class_weights = {});

/// Binary dataset file: u32 count, u32 dim, u32 classes (little-endian), then
/// count*dim float32 features and count uint8 labels.
void save_dataset(const dataset& d, const std::string& path);
dataset load_dataset(const std::string& path); // throws insufficient_data on malformed files

enum class partition_kind { iid, label_skew, dirichlet };

/// Split a dataset into per-client shards. Conserves examples exactly: every
/// id appears in exactly one shard. Throws insufficient_data when the dataset
/// holds fewer examples than clients.
std::vector<data_shard> make_partitions(const dataset& d, int num_clients, partition_kind kind,
                                        double dirichlet_alpha, uint64_t seed);

/// One-hidden-layer tanh MLP with softmax output, trained by full-batch
/// gradient descent on cross-entropy.
class mlp_model {
public:
    mlp_model(int dim, int hidden, int classes, uint64_t seed);

    int dim() const { return dim_; }
    int hidden() const { return hidden_; }
    int classes() const { return classes_; }

    static model_shape shape_of(int dim, int hidden, int classes);
    static std::string shape_id_of(int dim, int hidden, int classes);
    const std::string& shape_id() const { return shape_id_; }

    gradient_update params() const;
    void set_params(const gradient_update& p);
    /// theta <- theta - u, so applying (params_before - params_after)
    /// reproduces params_after.
    void apply_update(const gradient_update& u);

    std::vector<double> probabilities(const std::vector<double>& x) const;
    int predict(const std::vector<double>& x) const; // argmax, lowest index wins ties

    /// Mean cross-entropy over the examples plus the analytic gradient.
    double loss_and_gradient(const std::vector<example>& items, gradient_update& out) const;

private:
    int dim_, hidden_, classes_;
    std::string shape_id_;
    matrix w1_, b1_, w2_, b2_; // (dim x hidden), (hidden x 1), (hidden x classes), (classes x 1)
};

/// `epochs` full-batch GD steps at rate `lr` on a copy of the model; returns
/// params_before - params_after. Throws empty_shard. The seed is part of the
/// interface for reproducibility bookkeeping; full-batch descent itself is
/// deterministic.
gradient_update local_train(const mlp_model& model, const data_shard& shard, int epochs,
                            double lr, uint64_t seed);

/// Share of examples whose predicted label matches.
double evaluate(const mlp_model& model, const dataset& test);

enum class attack_kind { none, label_flip, gaussian_noise, mask_tamper };

struct attack_spec {
    attack_kind kind = attack_kind::none;
    bool collusion = false;
    double noise_std = 1.0;
};

/// Targeted flip l -> classes - 1 - l.
int flip_label(int label, int classes);

/// Apply a node's attack behaviour: label_flip rewrites the shard's labels
/// (before training), gaussian_noise replaces the update with i.i.d. noise,
/// none and mask_tamper pass both through (tampering happens at the masking
/// layer).
std::pair<data_shard, gradient_update> apply_attack(const attack_spec& spec,
                                                    const data_shard& shard,
                                                    const gradient_update& update,
                                                    int classes, uint64_t seed);

/// Central finite-difference gradient of the model's mean cross-entropy;
/// independent reference for gradient checks.
gradient_update numeric_gradient(const mlp_model& model, const std::vector<example>& items,
                                 double h);

} // namespace lshfed
