#include "lshfed/masking.hpp"

#include <string>

#include "lshfed/rng.hpp"

namespace lshfed {

namespace {
constexpr uint64_t kMaskTag = 0x4d41534b; // stream domain for mask draws
}

mask_config make_mask_config(const shape_registry& reg, const std::string& shape_id,
                             uint64_t scale, uint64_t modulus, std::vector<int> chain_order) {
    mask_config cfg;
    cfg.scale = scale;
    cfg.modulus = modulus;
    cfg.chain_order = std::move(chain_order);
    cfg.r_sum = constant_fixed(reg, shape_id, modulus / 2, scale, modulus);
    return cfg;
}

std::vector<mask_share> run_mask_chain(const mask_config& cfg, uint64_t round_seed) {
    const std::size_t n = cfg.chain_order.size();
    if (n < 2)
        throw group_too_small("mask chain needs at least two nodes");

    std::vector<mask_share> shares;
    shares.reserve(n);

    fixed_gradient residual = cfg.r_sum;
    for (std::size_t i = 0; i < n; ++i) {
        mask_share share;
        share.owner = cfg.chain_order[i];
        share.residual_in = residual;
        if (i + 1 < n) {
            // Fresh uniform mask per (round, node); the draw never depends on
            // chain position beyond the owner id.
            fixed_gradient mask = residual; // shape template
            std::size_t counter = 0;
            const uint64_t seed = rng::derive(round_seed, kMaskTag, static_cast<uint64_t>(share.owner));
            for (auto& m : mask.matrices)
                for (auto& e : m.data)
                    e = rng::uniform_mod_at(seed, counter++, cfg.modulus);
            share.mask = mask;
            residual = sub_mod(residual, mask);
            share.residual_out = residual;
        } else {
            // Last node closes the chain: its mask is the received residual,
            // forcing the masks to sum to r_sum (mod d).
            share.mask = residual;
            share.residual_out = sub_mod(residual, residual);
        }
        shares.push_back(std::move(share));
    }
    return shares;
}

std::map<int, fixed_gradient> masks_by_owner(const std::vector<mask_share>& shares) {
    std::map<int, fixed_gradient> out;
    for (const auto& s : shares)
        out.emplace(s.owner, s.mask);
    return out;
}

bool verify_mask_sum(const std::vector<fixed_gradient>& masks, const mask_config& cfg) {
    if (masks.empty())
        return false;
    fixed_gradient acc = masks[0];
    for (std::size_t i = 1; i < masks.size(); ++i)
        acc = add_mod(acc, masks[i]);
    if (acc.matrices.size() != cfg.r_sum.matrices.size())
        return false;
    for (std::size_t i = 0; i < acc.matrices.size(); ++i)
        if (acc.matrices[i].data != cfg.r_sum.matrices[i].data)
            return false;
    return true;
}

fixed_gradient apply_mask(const gradient_update& g, const fixed_gradient& mask,
                          const mask_config& cfg) {
    const fixed_gradient encoded = encode_fixed(g, cfg.scale, cfg.modulus);
    return add_mod(encoded, mask);
}

gradient_update unmask_aggregate(const std::vector<fixed_gradient>& masked,
                                 const mask_config& cfg, int k) {
    if (static_cast<int>(masked.size()) != k || k < 1)
        throw incomplete_group("expected " + std::to_string(k) + " masked shares, got " +
                               std::to_string(masked.size()));
    fixed_gradient acc = masked[0];
    for (std::size_t i = 1; i < masked.size(); ++i)
        acc = add_mod(acc, masked[i]);
    acc = sub_mod(acc, cfg.r_sum);
    const gradient_update sum = decode_fixed(acc);
    return scaled(sum, 1.0 / static_cast<double>(k));
}

} // namespace lshfed
