#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lshfed/tensor.hpp"

namespace lshfed {

/// r random hyperplanes per model matrix; hyperplane k for matrix i lives in
/// R^{m_i} (m_i = row count) and sketches that matrix's columns.
struct hyperplane_set {
    std::string shape_id;
    int per_matrix = 0; // r
    uint64_t master_seed = 0;
    // planes[i][k] is a vector of length rows(i).
    std::vector<std::vector<std::vector<double>>> planes;
};

/// Deterministic generation from (master_seed, matrix index, hyperplane
/// index); regenerating with the same arguments yields identical planes.
hyperplane_set generate_hyperplanes(const shape_registry& reg, const std::string& shape_id,
                                    int per_matrix, uint64_t master_seed);

/// Packed sign sketch of a gradient update. Bit order is canonical
/// (matrix i ascending, column j ascending, hyperplane k ascending),
/// MSB-first within each byte.
class bit_string {
public:
    bit_string() = default;
    bit_string(std::string shape_id, int per_matrix, uint32_t bit_length);

    uint32_t bit_length() const { return bit_length_; }
    const std::string& shape_id() const { return shape_id_; }
    int per_matrix() const { return per_matrix_; }
    const std::vector<uint8_t>& bytes() const { return bytes_; }

    bool get(uint32_t index) const {
        return (bytes_[index >> 3] >> (7 - (index & 7))) & 1u;
    }
    void set(uint32_t index, bool value) {
        const uint8_t mask = static_cast<uint8_t>(1u << (7 - (index & 7)));
        if (value)
            bytes_[index >> 3] |= mask;
        else
            bytes_[index >> 3] &= static_cast<uint8_t>(~mask);
    }

    bool operator==(const bit_string&) const = default;

    /// Wire form: 4-byte little-endian bit length, then ceil(L/8) packed
    /// bytes. This is exactly what the byte meter counts.
    std::vector<uint8_t> serialize() const;
    static bit_string deserialize(const std::vector<uint8_t>& wire, std::string shape_id,
                                  int per_matrix); // throws length_mismatch

private:
    std::string shape_id_;
    int per_matrix_ = 0;
    uint32_t bit_length_ = 0;
    std::vector<uint8_t> bytes_;
};

/// Sign projection: bit for (i, j, k) is 1 iff dot(plane[i][k], column j of
/// matrix i) >= 0. Total length r * sum_i n_i.
bit_string project(const gradient_update& g, const hyperplane_set& planes);

/// Hamming distance via XOR + popcount; throws length_mismatch on unequal
/// lengths.
int hamming(const bit_string& a, const bit_string& b);

struct ranked_candidate {
    int node_id = -1;
    int distance = 0;
};

struct ranking_result {
    /// Ascending distance, ties broken by ascending node id.
    std::vector<ranked_candidate> ranked;
    /// First min(filter_rank, |candidates|) of `ranked`.
    std::vector<int> accepted;
};

/// Rank candidate bit strings against the benchmark. Throws empty_candidates
/// when the list is empty and length_mismatch when any candidate length
/// differs from the benchmark.
ranking_result rank_candidates(const std::vector<std::pair<int, bit_string>>& candidates,
                               const bit_string& benchmark, int filter_rank);

struct correlation_result {
    double pearson = 0.0; // 0 when either variance is zero
    // (euclidean distance, hamming distance) per pair.
    std::vector<std::pair<double, double>> points;
    // Mean hamming distance per perturbation-scale bucket (10 buckets).
    std::vector<double> bucket_mean_hamming;
};

/// Random gradient pairs at graded Euclidean separations, projected with one
/// shared hyperplane set; reports the Pearson correlation between Euclidean
/// and Hamming distances.
correlation_result correlation_study(const shape_registry& reg, const std::string& shape_id,
                                     int per_matrix, int num_pairs, double scale_min,
                                     double scale_max, uint64_t seed);

} // namespace lshfed
