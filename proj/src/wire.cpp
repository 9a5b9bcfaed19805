#include "lshfed/wire.hpp"

#include <cstring>

namespace lshfed {

const char* payload_kind_name(payload_kind k) {
    switch (k) {
    case payload_kind::model_broadcast: return "model_broadcast";
    case payload_kind::masked_gradient: return "masked_gradient";
    case payload_kind::bit_string: return "bit_string";
    case payload_kind::notification: return "notification";
    case payload_kind::score_report: return "score_report";
    }
    return "unknown";
}

namespace {

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<uint8_t>((v >> 24) & 0xff));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

/// Shape header shared by both gradient wire forms: u32 matrix count, then
/// u32 rows / u32 cols per matrix.
constexpr uint64_t shape_header_size(std::size_t matrices) { return 4 + 8 * matrices; }

} // namespace

std::vector<uint8_t> serialize(const gradient_update& g) {
    std::vector<uint8_t> out;
    out.reserve(shape_header_size(g.matrices.size()) + 8 * g.total_entries());
    put_u32(out, static_cast<uint32_t>(g.matrices.size()));
    for (const auto& m : g.matrices) {
        put_u32(out, static_cast<uint32_t>(m.rows()));
        put_u32(out, static_cast<uint32_t>(m.cols()));
    }
    for (const auto& m : g.matrices)
        for (double v : m.data())
            put_f64(out, v);
    return out;
}

std::vector<uint8_t> serialize(const fixed_gradient& f) {
    std::vector<uint8_t> out;
    out.reserve(shape_header_size(f.matrices.size()) + 8 * f.total_entries());
    put_u32(out, static_cast<uint32_t>(f.matrices.size()));
    for (const auto& m : f.matrices) {
        put_u32(out, static_cast<uint32_t>(m.rows));
        put_u32(out, static_cast<uint32_t>(m.cols));
    }
    for (const auto& m : f.matrices)
        for (uint64_t e : m.data)
            put_u64(out, e);
    return out;
}

std::vector<uint8_t> serialize(const notification_payload& n) {
    std::vector<uint8_t> out;
    out.reserve(16);
    put_u64(out, n.round_id);
    put_u64(out, n.ag_id);
    return out;
}

std::vector<uint8_t> serialize(const score_report_payload& s) {
    std::vector<uint8_t> out;
    out.reserve(24);
    put_u64(out, s.round_id);
    put_u64(out, s.node_id);
    put_f64(out, s.seconds);
    return out;
}

uint64_t meter(const payload& p) {
    struct visitor {
        uint64_t operator()(const std::monostate&) const {
            throw unknown_payload("cannot meter an empty payload");
        }
        uint64_t operator()(const gradient_update& g) const {
            return shape_header_size(g.matrices.size()) + 8 * g.total_entries();
        }
        uint64_t operator()(const fixed_gradient& f) const {
            return shape_header_size(f.matrices.size()) + 8 * f.total_entries();
        }
        uint64_t operator()(const bit_string& b) const {
            return bit_string_wire_size(b.bit_length());
        }
        uint64_t operator()(const notification_payload&) const { return 16; }
        uint64_t operator()(const score_report_payload&) const { return 24; }
    };
    return std::visit(visitor{}, p);
}

uint64_t gradient_wire_size(const model_shape& shape) {
    return shape_header_size(shape.size()) + 8 * total_params(shape);
}

uint64_t bit_string_wire_size(uint32_t bit_length) { return 4 + (bit_length + 7) / 8; }

} // namespace lshfed
