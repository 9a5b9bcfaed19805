#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "lshfed/fixed_point.hpp"
#include "lshfed/lshgm.hpp"
#include "lshfed/tensor.hpp"

namespace lshfed {

enum class payload_kind { model_broadcast, masked_gradient, bit_string, notification, score_report };

const char* payload_kind_name(payload_kind k);

/// Winner notice from the verifier to the selected aggregator.
struct notification_payload {
    uint64_t round_id = 0;
    uint64_t ag_id = 0;
};

/// End-of-round compute-time report from an active node to the verifier.
struct score_report_payload {
    uint64_t round_id = 0;
    uint64_t node_id = 0;
    double seconds = 0.0;
};

/// Anything the simulator puts on the wire. Byte accounting is defined as the
/// exact serialized length of one of these.
using payload = std::variant<std::monostate, gradient_update, fixed_gradient, bit_string,
                             notification_payload, score_report_payload>;

/// Serializers. Gradient payloads carry a shape header (u32 matrix count,
/// then u32 rows / u32 cols per matrix) followed by entries: little-endian
/// doubles for model broadcasts, little-endian u64 residues for masked
/// gradients. Bit strings use bit_string::serialize().
std::vector<uint8_t> serialize(const gradient_update& g);
std::vector<uint8_t> serialize(const fixed_gradient& f);
std::vector<uint8_t> serialize(const notification_payload& n);
std::vector<uint8_t> serialize(const score_report_payload& s);

/// Exact byte size of the serialized payload; throws unknown_payload for an
/// empty payload.
uint64_t meter(const payload& p);

/// Size helpers used for the hypothetical full-gradient comparison: what a
/// payload of this geometry would meter without building it.
uint64_t gradient_wire_size(const model_shape& shape);
uint64_t bit_string_wire_size(uint32_t bit_length);

} // namespace lshfed
