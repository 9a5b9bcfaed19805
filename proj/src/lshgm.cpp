#include "lshfed/lshgm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "lshfed/rng.hpp"

namespace lshfed {

namespace {

constexpr uint64_t kHyperplaneTag = 0x4c534847; // stream domain for plane generation

} // namespace

hyperplane_set generate_hyperplanes(const shape_registry& reg, const std::string& shape_id,
                                    int per_matrix, uint64_t master_seed) {
    if (per_matrix < 1)
        throw shape_mismatch("hyperplane count per matrix must be >= 1");
    const auto& shape = reg.lookup(shape_id);
    hyperplane_set hs;
    hs.shape_id = shape_id;
    hs.per_matrix = per_matrix;
    hs.master_seed = master_seed;
    hs.planes.resize(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) {
        hs.planes[i].resize(per_matrix);
        for (int k = 0; k < per_matrix; ++k) {
            const uint64_t seed = rng::derive(master_seed, kHyperplaneTag, i, static_cast<uint64_t>(k));
            auto& plane = hs.planes[i][k];
            plane.resize(shape[i].rows);
            for (int row = 0; row < shape[i].rows; ++row)
                plane[row] = rng::normal_at(seed, static_cast<uint64_t>(row));
        }
    }
    return hs;
}

bit_string::bit_string(std::string shape_id, int per_matrix, uint32_t bit_length)
    : shape_id_(std::move(shape_id)),
      per_matrix_(per_matrix),
      bit_length_(bit_length),
      bytes_((bit_length + 7) / 8, 0) {}

std::vector<uint8_t> bit_string::serialize() const {
    std::vector<uint8_t> wire;
    wire.reserve(4 + bytes_.size());
    wire.push_back(static_cast<uint8_t>(bit_length_ & 0xff));
    wire.push_back(static_cast<uint8_t>((bit_length_ >> 8) & 0xff));
    wire.push_back(static_cast<uint8_t>((bit_length_ >> 16) & 0xff));
    wire.push_back(static_cast<uint8_t>((bit_length_ >> 24) & 0xff));
    wire.insert(wire.end(), bytes_.begin(), bytes_.end());
    return wire;
}

bit_string bit_string::deserialize(const std::vector<uint8_t>& wire, std::string shape_id,
                                   int per_matrix) {
    if (wire.size() < 4)
        throw length_mismatch("bit-string wire form shorter than its length header");
    const uint32_t bits = static_cast<uint32_t>(wire[0]) | (static_cast<uint32_t>(wire[1]) << 8) |
                          (static_cast<uint32_t>(wire[2]) << 16) |
                          (static_cast<uint32_t>(wire[3]) << 24);
    const std::size_t expected = 4 + (bits + 7) / 8;
    if (wire.size() != expected)
        throw length_mismatch("bit-string wire form length does not match its header");
    bit_string out(std::move(shape_id), per_matrix, bits);
    std::copy(wire.begin() + 4, wire.end(), out.bytes_.begin());
    return out;
}

bit_string project(const gradient_update& g, const hyperplane_set& planes) {
    if (g.matrices.size() != planes.planes.size())
        throw shape_mismatch("update and hyperplane set disagree on matrix count");
    for (std::size_t i = 0; i < g.matrices.size(); ++i) {
        if (planes.planes[i].empty())
            throw shape_mismatch("hyperplane set holds no planes for matrix " + std::to_string(i));
        if (static_cast<std::size_t>(g.matrices[i].rows()) != planes.planes[i][0].size())
            throw shape_mismatch("hyperplane dimension does not match matrix rows");
    }

    uint32_t bits = 0;
    for (const auto& m : g.matrices)
        bits += static_cast<uint32_t>(m.cols()) * static_cast<uint32_t>(planes.per_matrix);

    bit_string out(planes.shape_id, planes.per_matrix, bits);
    uint32_t pos = 0;
    for (std::size_t i = 0; i < g.matrices.size(); ++i) {
        const matrix& m = g.matrices[i];
        for (int j = 0; j < m.cols(); ++j) {
            for (int k = 0; k < planes.per_matrix; ++k) {
                const auto& plane = planes.planes[i][k];
                double dot = 0.0;
                for (int row = 0; row < m.rows(); ++row)
                    dot += plane[row] * m.at(row, j);
                out.set(pos++, dot >= 0.0);
            }
        }
    }
    return out;
}

int hamming(const bit_string& a, const bit_string& b) {
    if (a.bit_length() != b.bit_length())
        throw length_mismatch("bit strings differ in length");
    const auto& x = a.bytes();
    const auto& y = b.bytes();
    int distance = 0;
    std::size_t i = 0;
    for (; i + 8 <= x.size(); i += 8) {
        uint64_t wx, wy;
        std::memcpy(&wx, x.data() + i, 8);
        std::memcpy(&wy, y.data() + i, 8);
        distance += std::popcount(wx ^ wy);
    }
    for (; i < x.size(); ++i)
        distance += std::popcount(static_cast<unsigned>(x[i] ^ y[i]));
    return distance;
}

ranking_result rank_candidates(const std::vector<std::pair<int, bit_string>>& candidates,
                               const bit_string& benchmark, int filter_rank) {
    if (candidates.empty())
        throw empty_candidates("no candidate bit strings to rank");
    if (filter_rank < 1)
        throw empty_candidates("filter rank must be >= 1");

    ranking_result result;
    result.ranked.reserve(candidates.size());
    for (const auto& [node, bits] : candidates)
        result.ranked.push_back({node, hamming(bits, benchmark)});

    std::sort(result.ranked.begin(), result.ranked.end(), [](const auto& a, const auto& b) {
        if (a.distance != b.distance)
            return a.distance < b.distance;
        return a.node_id < b.node_id;
    });

    const std::size_t take = std::min<std::size_t>(filter_rank, result.ranked.size());
    for (std::size_t i = 0; i < take; ++i)
        result.accepted.push_back(result.ranked[i].node_id);
    return result;
}

correlation_result correlation_study(const shape_registry& reg, const std::string& shape_id,
                                     int per_matrix, int num_pairs, double scale_min,
                                     double scale_max, uint64_t seed) {
    if (num_pairs < 2)
        throw insufficient_data("correlation study needs at least two pairs");
    if (scale_max < scale_min)
        throw insufficient_data("perturbation scale range is inverted");

    const auto planes = generate_hyperplanes(reg, shape_id, per_matrix, rng::derive(seed, 1));

    correlation_result result;
    result.points.reserve(num_pairs);
    for (int p = 0; p < num_pairs; ++p) {
        const double t = num_pairs == 1
                             ? scale_min
                             : scale_min + (scale_max - scale_min) * p / (num_pairs - 1.0);
        const gradient_update base = random_update(reg, shape_id, 1.0, rng::derive(seed, 2, p));
        const gradient_update noise = random_update(reg, shape_id, 1.0, rng::derive(seed, 3, p));
        const gradient_update other = add(base, scaled(noise, t));
        const double euclid = euclidean_distance(base, other);
        const int ham = hamming(project(base, planes), project(other, planes));
        result.points.emplace_back(euclid, static_cast<double>(ham));
    }

    // Pearson coefficient; defined as 0 when either marginal is constant.
    double mx = 0, my = 0;
    for (const auto& [x, y] : result.points) {
        mx += x;
        my += y;
    }
    mx /= result.points.size();
    my /= result.points.size();
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& [x, y] : result.points) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    result.pearson = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;

    // Bucket means over the perturbation grid (10 equal slices of the pair
    // index, which is monotone in the scale).
    constexpr int buckets = 10;
    result.bucket_mean_hamming.assign(buckets, 0.0);
    std::vector<int> counts(buckets, 0);
    for (int p = 0; p < num_pairs; ++p) {
        const int b = std::min(buckets - 1, p * buckets / num_pairs);
        result.bucket_mean_hamming[b] += result.points[p].second;
        counts[b]++;
    }
    for (int b = 0; b < buckets; ++b)
        if (counts[b] > 0)
            result.bucket_mean_hamming[b] /= counts[b];
    return result;
}

} // namespace lshfed
