#include "lshfed/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>

#include "lshfed/rng.hpp"

namespace lshfed {

namespace {

constexpr uint64_t kMeanTag = 0x424c4f42;    // blob class means
constexpr uint64_t kSampleTag = 0x53414d50;  // per-example noise
constexpr uint64_t kLabelTag = 0x4c41424c;   // label assignment
constexpr uint64_t kShuffleTag = 0x53484646; // partition shuffles
constexpr uint64_t kDirTag = 0x44495243;     // dirichlet draws
constexpr uint64_t kNoiseTag = 0x4e4f4953;   // gaussian-noise attack

void shuffle_indices(std::vector<int>& idx, uint64_t seed) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng::uniform_mod_at(seed, i, i));
        std::swap(idx[i - 1], idx[j]);
    }
}

} // namespace

dataset make_blob_dataset(int count, int dim, int classes, double mean_scale,
                          uint64_t means_seed, uint64_t sample_seed,
                          const std::vector<double>& class_weights) {
    if (count < 1 || dim < 1 || classes < 2)
        throw insufficient_data("blob dataset needs count >= 1, dim >= 1, classes >= 2");
    if (!class_weights.empty() && static_cast<int>(class_weights.size()) != classes)
        throw insufficient_data("class weight vector length must equal the class count");

    // Class means, fixed by the means seed alone.
    std::vector<std::vector<double>> means(classes, std::vector<double>(dim));
    for (int c = 0; c < classes; ++c) {
        const uint64_t ms = rng::derive(means_seed, kMeanTag, c);
        for (int k = 0; k < dim; ++k)
            means[c][k] = mean_scale * rng::normal_at(ms, k);
    }

    // Label sequence: balanced round-robin, or largest-remainder counts for a
    // weighted composition, then a seeded shuffle.
    std::vector<int> labels;
    labels.reserve(count);
    if (class_weights.empty()) {
        for (int i = 0; i < count; ++i)
            labels.push_back(i % classes);
    } else {
        std::vector<int> counts(classes, 0);
        std::vector<std::pair<double, int>> remainders;
        int assigned = 0;
        for (int c = 0; c < classes; ++c) {
            const double exact = class_weights[c] * count;
            counts[c] = static_cast<int>(std::floor(exact));
            assigned += counts[c];
            remainders.emplace_back(exact - counts[c], c);
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first)
                return a.first > b.first;
            return a.second < b.second;
        });
        for (int i = 0; assigned < count; ++i, ++assigned)
            counts[remainders[i % classes].second]++;
        for (int c = 0; c < classes; ++c)
            labels.insert(labels.end(), counts[c], c);
    }
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    shuffle_indices(order, rng::derive(sample_seed, kLabelTag));

    dataset d;
    d.dim = dim;
    d.classes = classes;
    d.items.resize(count);
    for (int i = 0; i < count; ++i) {
        example& e = d.items[i];
        e.label = labels[order[i]];
        e.x.resize(dim);
        const uint64_t es = rng::derive(sample_seed, kSampleTag, i);
        for (int k = 0; k < dim; ++k)
            e.x[k] = means[e.label][k] + rng::normal_at(es, k);
    }
    return d;
}

void save_dataset(const dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw insufficient_data("cannot open dataset file for writing: " + path);
    auto put_u32 = [&out](uint32_t v) {
        uint8_t b[4] = {static_cast<uint8_t>(v & 0xff), static_cast<uint8_t>((v >> 8) & 0xff),
                        static_cast<uint8_t>((v >> 16) & 0xff),
                        static_cast<uint8_t>((v >> 24) & 0xff)};
        out.write(reinterpret_cast<const char*>(b), 4);
    };
    put_u32(static_cast<uint32_t>(d.items.size()));
    put_u32(static_cast<uint32_t>(d.dim));
    put_u32(static_cast<uint32_t>(d.classes));
    for (const auto& e : d.items)
        for (double v : e.x) {
            const float f = static_cast<float>(v);
            static_assert(sizeof(float) == 4);
            uint32_t bits;
            std::memcpy(&bits, &f, 4);
            put_u32(bits);
        }
    for (const auto& e : d.items) {
        const auto label = static_cast<uint8_t>(e.label);
        out.write(reinterpret_cast<const char*>(&label), 1);
    }
}

dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw insufficient_data("cannot open dataset file: " + path);
    auto get_u32 = [&in, &path]() {
        uint8_t b[4];
        in.read(reinterpret_cast<char*>(b), 4);
        if (!in)
            throw insufficient_data("truncated dataset file: " + path);
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    };
    dataset d;
    const uint32_t count = get_u32();
    d.dim = static_cast<int>(get_u32());
    d.classes = static_cast<int>(get_u32());
    if (count == 0 || d.dim < 1 || d.classes < 2)
        throw insufficient_data("dataset header is degenerate: " + path);
    d.items.resize(count);
    for (auto& e : d.items) {
        e.x.resize(d.dim);
        for (int k = 0; k < d.dim; ++k) {
            const uint32_t bits = get_u32();
            float f;
            std::memcpy(&f, &bits, 4);
            e.x[k] = static_cast<double>(f);
        }
    }
    for (auto& e : d.items) {
        uint8_t label;
        in.read(reinterpret_cast<char*>(&label), 1);
        if (!in)
            throw insufficient_data("truncated dataset labels: " + path);
        if (label >= d.classes)
            throw insufficient_data("dataset label out of range: " + path);
        e.label = label;
    }
    return d;
}

std::vector<data_shard> make_partitions(const dataset& d, int num_clients, partition_kind kind,
                                        double dirichlet_alpha, uint64_t seed) {
    const int n = static_cast<int>(d.items.size());
    if (num_clients < 1)
        throw insufficient_data("partitioning needs at least one client");
    if (n < num_clients)
        throw insufficient_data("fewer examples than clients");

    // Per-client id lists; examples are dealt exactly once.
    std::vector<std::vector<int>> owned(num_clients);

    if (kind == partition_kind::iid) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        shuffle_indices(order, rng::derive(seed, kShuffleTag, 0));
        for (int i = 0; i < n; ++i)
            owned[i % num_clients].push_back(order[i]);
    } else if (kind == partition_kind::label_skew) {
        // 70% of each shard from the two shared primary classes (0 and 1),
        // 30% round-robin over the rest; falls back to any remaining example
        // when a bucket empties so that conservation always holds.
        std::vector<std::vector<int>> buckets(d.classes);
        for (int i = 0; i < n; ++i)
            buckets[d.items[i].label].push_back(i);
        for (int c = 0; c < d.classes; ++c)
            shuffle_indices(buckets[c], rng::derive(seed, kShuffleTag, 1 + c));

        const int base = n / num_clients;
        std::vector<int> want(num_clients, base);
        for (int c = 0; c < n % num_clients; ++c)
            want[c]++;

        auto take_from = [&buckets](int cls) -> int {
            if (buckets[cls].empty())
                return -1;
            const int id = buckets[cls].back();
            buckets[cls].pop_back();
            return id;
        };
        auto take_any = [&buckets]() -> int {
            for (auto& b : buckets)
                if (!b.empty()) {
                    const int id = b.back();
                    b.pop_back();
                    return id;
                }
            return -1;
        };

        const int primaries = std::min(2, d.classes);
        for (int client = 0; client < num_clients; ++client) {
            const int primary_quota = static_cast<int>(std::floor(0.7 * want[client]));
            for (int i = 0; i < want[client]; ++i) {
                int id = -1;
                if (i < primary_quota) {
                    id = take_from(i % primaries);
                } else if (d.classes > primaries) {
                    id = take_from(primaries + (i % (d.classes - primaries)));
                }
                if (id < 0)
                    id = take_any();
                owned[client].push_back(id);
            }
        }
    } else { // dirichlet
        if (dirichlet_alpha <= 0.0)
            throw insufficient_data("dirichlet concentration must be positive");
        std::vector<std::vector<int>> buckets(d.classes);
        for (int i = 0; i < n; ++i)
            buckets[d.items[i].label].push_back(i);
        for (int c = 0; c < d.classes; ++c)
            shuffle_indices(buckets[c], rng::derive(seed, kShuffleTag, 100 + c));

        // Marsaglia-Tsang gamma sampler on a sequential stream; normalized
        // gammas give the Dirichlet proportions per class.
        auto gamma_draw = [](rng::stream& s, double alpha) {
            double boost = 1.0;
            double a = alpha;
            if (a < 1.0) {
                boost = std::pow(std::max(s.next_u01(), 1e-300), 1.0 / a);
                a += 1.0;
            }
            const double d0 = a - 1.0 / 3.0;
            const double c0 = 1.0 / std::sqrt(9.0 * d0);
            for (;;) {
                const double z = s.next_normal();
                const double v = std::pow(1.0 + c0 * z, 3.0);
                if (v <= 0.0)
                    continue;
                const double u = std::max(s.next_u01(), 1e-300);
                if (std::log(u) < 0.5 * z * z + d0 - d0 * v + d0 * std::log(v))
                    return boost * d0 * v;
            }
        };

        for (int c = 0; c < d.classes; ++c) {
            rng::stream s(rng::derive(seed, kDirTag, c));
            std::vector<double> props(num_clients);
            double total = 0.0;
            for (int k = 0; k < num_clients; ++k) {
                props[k] = gamma_draw(s, dirichlet_alpha);
                total += props[k];
            }
            const int m = static_cast<int>(buckets[c].size());
            // Largest-remainder apportioning of this class's examples.
            std::vector<int> counts(num_clients, 0);
            std::vector<std::pair<double, int>> rema;
            int assigned = 0;
            for (int k = 0; k < num_clients; ++k) {
                const double exact = total > 0.0 ? props[k] / total * m
                                                 : static_cast<double>(m) / num_clients;
                counts[k] = static_cast<int>(std::floor(exact));
                assigned += counts[k];
                rema.emplace_back(exact - counts[k], k);
            }
            std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
                if (a.first != b.first)
                    return a.first > b.first;
                return a.second < b.second;
            });
            for (int i = 0; assigned < m; ++i, ++assigned)
                counts[rema[i % num_clients].second]++;
            int cursor = 0;
            for (int k = 0; k < num_clients; ++k)
                for (int t = 0; t < counts[k]; ++t)
                    owned[k].push_back(buckets[c][cursor++]);
        }

        // Guarantee non-empty shards: borrow one example from the richest.
        for (int k = 0; k < num_clients; ++k) {
            if (!owned[k].empty())
                continue;
            int richest = 0;
            for (int j = 1; j < num_clients; ++j)
                if (owned[j].size() > owned[richest].size())
                    richest = j;
            owned[k].push_back(owned[richest].back());
            owned[richest].pop_back();
        }
    }

    std::vector<data_shard> shards(num_clients);
    for (int k = 0; k < num_clients; ++k) {
        shards[k].owner = k;
        std::sort(owned[k].begin(), owned[k].end());
        shards[k].ids = owned[k];
        shards[k].items.reserve(owned[k].size());
        for (int id : owned[k])
            shards[k].items.push_back(d.items[id]);
    }
    return shards;
}

model_shape mlp_model::shape_of(int dim, int hidden, int classes) {
    return {{dim, hidden}, {hidden, 1}, {hidden, classes}, {classes, 1}};
}

std::string mlp_model::shape_id_of(int dim, int hidden, int classes) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "mlp-%d-%d-%d", dim, hidden, classes);
    return buf;
}

mlp_model::mlp_model(int dim, int hidden, int classes, uint64_t seed)
    : dim_(dim),
      hidden_(hidden),
      classes_(classes),
      shape_id_(shape_id_of(dim, hidden, classes)),
      w1_(dim, hidden),
      b1_(hidden, 1),
      w2_(hidden, classes),
      b2_(classes, 1) {
    if (dim < 1 || hidden < 1 || classes < 2)
        throw shape_mismatch("model needs dim >= 1, hidden >= 1, classes >= 2");
    // Xavier-style init: N(0, 1/fan_in); biases start at zero.
    const double s1 = 1.0 / std::sqrt(static_cast<double>(dim));
    const matrix g1 = seeded_normal_matrix(dim, hidden, rng::derive(seed, 1));
    for (std::size_t i = 0; i < w1_.data().size(); ++i)
        w1_.data()[i] = s1 * g1.data()[i];
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    const matrix g2 = seeded_normal_matrix(hidden, classes, rng::derive(seed, 2));
    for (std::size_t i = 0; i < w2_.data().size(); ++i)
        w2_.data()[i] = s2 * g2.data()[i];
}

gradient_update mlp_model::params() const {
    gradient_update g;
    g.shape_id = shape_id_;
    g.matrices = {w1_, b1_, w2_, b2_};
    return g;
}

void mlp_model::set_params(const gradient_update& p) {
    require_same_shape(p, params());
    w1_ = p.matrices[0];
    b1_ = p.matrices[1];
    w2_ = p.matrices[2];
    b2_ = p.matrices[3];
}

void mlp_model::apply_update(const gradient_update& u) { set_params(sub(params(), u)); }

namespace {

// Forward pass into caller-provided buffers; returns the probability vector.
void forward_buffers(const matrix& w1, const matrix& b1, const matrix& w2, const matrix& b2,
                     const std::vector<double>& x, std::vector<double>& hidden,
                     std::vector<double>& probs) {
    const int h = w1.cols();
    const int c = w2.cols();
    hidden.assign(h, 0.0);
    for (int row = 0; row < w1.rows(); ++row) {
        const double xv = x[row];
        if (xv == 0.0)
            continue;
        for (int j = 0; j < h; ++j)
            hidden[j] += xv * w1.at(row, j);
    }
    for (int j = 0; j < h; ++j)
        hidden[j] = std::tanh(hidden[j] + b1.at(j, 0));

    probs.assign(c, 0.0);
    for (int j = 0; j < h; ++j) {
        const double hv = hidden[j];
        for (int k = 0; k < c; ++k)
            probs[k] += hv * w2.at(j, k);
    }
    double zmax = -1e300;
    for (int k = 0; k < c; ++k) {
        probs[k] += b2.at(k, 0);
        zmax = std::max(zmax, probs[k]);
    }
    double zsum = 0.0;
    for (int k = 0; k < c; ++k) {
        probs[k] = std::exp(probs[k] - zmax);
        zsum += probs[k];
    }
    for (int k = 0; k < c; ++k)
        probs[k] /= zsum;
}

} // namespace

std::vector<double> mlp_model::probabilities(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != dim_)
        throw shape_mismatch("input dimension does not match the model");
    std::vector<double> hidden, probs;
    forward_buffers(w1_, b1_, w2_, b2_, x, hidden, probs);
    return probs;
}

int mlp_model::predict(const std::vector<double>& x) const {
    const auto probs = probabilities(x);
    int best = 0;
    for (int k = 1; k < classes_; ++k)
        if (probs[k] > probs[best]) // strict: ties keep the lowest class index
            best = k;
    return best;
}

double mlp_model::loss_and_gradient(const std::vector<example>& items, gradient_update& out) const {
    if (items.empty())
        throw empty_shard("cannot compute gradients on an empty example list");

    matrix gw1(dim_, hidden_), gb1(hidden_, 1), gw2(hidden_, classes_), gb2(classes_, 1);
    std::vector<double> hidden, probs, dhidden(hidden_);
    double loss = 0.0;
    const double inv_n = 1.0 / static_cast<double>(items.size());

    for (const auto& e : items) {
        if (static_cast<int>(e.x.size()) != dim_)
            throw shape_mismatch("example dimension does not match the model");
        forward_buffers(w1_, b1_, w2_, b2_, e.x, hidden, probs);
        loss -= std::log(std::max(probs[e.label], 1e-300));

        // dL/dz_k = p_k - 1{k == label}
        for (int k = 0; k < classes_; ++k) {
            const double dz = (probs[k] - (k == e.label ? 1.0 : 0.0)) * inv_n;
            gb2.at(k, 0) += dz;
            for (int j = 0; j < hidden_; ++j)
                gw2.at(j, k) += hidden[j] * dz;
        }
        for (int j = 0; j < hidden_; ++j) {
            double acc = 0.0;
            for (int k = 0; k < classes_; ++k)
                acc += (probs[k] - (k == e.label ? 1.0 : 0.0)) * w2_.at(j, k);
            dhidden[j] = acc * (1.0 - hidden[j] * hidden[j]) * inv_n;
        }
        for (int row = 0; row < dim_; ++row) {
            const double xv = e.x[row];
            if (xv == 0.0)
                continue;
            for (int j = 0; j < hidden_; ++j)
                gw1.at(row, j) += xv * dhidden[j];
        }
        for (int j = 0; j < hidden_; ++j)
            gb1.at(j, 0) += dhidden[j];
    }

    out.shape_id = shape_id_;
    out.matrices = {std::move(gw1), std::move(gb1), std::move(gw2), std::move(gb2)};
    return loss * inv_n;
}

gradient_update local_train(const mlp_model& model, const data_shard& shard, int epochs,
                            double lr, uint64_t seed) {
    (void)seed; // full-batch descent is deterministic; kept for interface stability
    if (shard.items.empty())
        throw empty_shard("local training requires a non-empty shard");
    if (epochs < 1)
        throw insufficient_data("local training needs at least one epoch");

    mlp_model local = model;
    const gradient_update before = local.params();
    for (int e = 0; e < epochs; ++e) {
        gradient_update grad;
        local.loss_and_gradient(shard.items, grad);
        local.apply_update(scaled(grad, lr));
    }
    return sub(before, local.params());
}

double evaluate(const mlp_model& model, const dataset& test) {
    if (test.items.empty())
        throw insufficient_data("evaluation requires a non-empty test set");
    int correct = 0;
    for (const auto& e : test.items)
        if (model.predict(e.x) == e.label)
            ++correct;
    return static_cast<double>(correct) / static_cast<double>(test.items.size());
}

int flip_label(int label, int classes) { return classes - 1 - label; }

std::pair<data_shard, gradient_update> apply_attack(const attack_spec& spec,
                                                    const data_shard& shard,
                                                    const gradient_update& update, int classes,
                                                    uint64_t seed) {
    switch (spec.kind) {
    case attack_kind::label_flip: {
        data_shard flipped = shard;
        for (auto& e : flipped.items)
            e.label = flip_label(e.label, classes);
        return {std::move(flipped), update};
    }
    case attack_kind::gaussian_noise: {
        gradient_update noisy = update;
        std::size_t counter = 0;
        const uint64_t s = rng::derive(seed, kNoiseTag);
        for (auto& m : noisy.matrices)
            for (auto& v : m.data())
                v = spec.noise_std * rng::normal_at(s, counter++);
        return {shard, std::move(noisy)};
    }
    case attack_kind::none:
    case attack_kind::mask_tamper:
    default:
        return {shard, update};
    }
}

gradient_update numeric_gradient(const mlp_model& model, const std::vector<example>& items,
                                 double h) {
    mlp_model probe = model;
    gradient_update theta = model.params();
    gradient_update grad = theta;

    auto loss_at = [&probe, &items](const gradient_update& p) {
        probe.set_params(p);
        gradient_update unused;
        return probe.loss_and_gradient(items, unused);
    };

    for (std::size_t mi = 0; mi < theta.matrices.size(); ++mi) {
        for (std::size_t k = 0; k < theta.matrices[mi].data().size(); ++k) {
            gradient_update plus = theta;
            plus.matrices[mi].data()[k] += h;
            gradient_update minus = theta;
            minus.matrices[mi].data()[k] -= h;
            grad.matrices[mi].data()[k] = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace lshfed
