#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lshfed/fixed_point.hpp"

namespace lshfed {

/// Shared parameters of one group's mask chain. r_sum is the public target
/// the group's masks must sum to (mod d); chain_order fixes who draws first.
struct mask_config {
    fixed_gradient r_sum;
    uint64_t scale = 0;
    uint64_t modulus = 0;
    std::vector<int> chain_order;
};

/// Standard config with r_sum all entries equal to modulus/2.
mask_config make_mask_config(const shape_registry& reg, const std::string& shape_id,
                             uint64_t scale, uint64_t modulus, std::vector<int> chain_order);

/// One node's slice of the chain: the residual it received, the mask it
/// keeps, and the residual it forwards (residual_out = residual_in - mask).
struct mask_share {
    int owner = -1;
    fixed_gradient residual_in;
    fixed_gradient mask;
    fixed_gradient residual_out;
};

/// Run the chain: the first node receives r_sum, every node but the last
/// draws a fresh uniform mask and forwards the shrunken residual, and the
/// last node keeps the residual itself so the masks sum to r_sum exactly.
/// Throws group_too_small when fewer than two nodes are chained.
std::vector<mask_share> run_mask_chain(const mask_config& cfg, uint64_t round_seed);

std::map<int, fixed_gradient> masks_by_owner(const std::vector<mask_share>& shares);

/// True iff the masks sum to r_sum (mod d) entrywise.
bool verify_mask_sum(const std::vector<fixed_gradient>& masks, const mask_config& cfg);

/// Encode g in fixed point and add the mask (mod d). Throws overflow_error /
/// shape_mismatch via the codec.
fixed_gradient apply_mask(const gradient_update& g, const fixed_gradient& mask,
                          const mask_config& cfg);

/// Sum k masked shares, remove r_sum, decode, and divide by k: the group mean
/// update. Throws incomplete_group unless exactly k shares are present.
gradient_update unmask_aggregate(const std::vector<fixed_gradient>& masked,
                                 const mask_config& cfg, int k);

} // namespace lshfed
