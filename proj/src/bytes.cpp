#include "inuksuk/bytes.hpp"

namespace inuksuk {

Bytes to_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

std::string to_string(std::span<const uint8_t> b) { return std::string(b.begin(), b.end()); }

std::string hex_encode(std::span<const uint8_t> b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (uint8_t c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xF]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes hex_decode(const std::string& hex) {
    if (hex.size() % 2 != 0) return {};
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return {};
        out.push_back(uint8_t(hi << 4 | lo));
    }
    return out;
}

void put_u64be(std::span<uint8_t> out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = uint8_t(v >> (8 * (7 - i)));
}

uint64_t get_u64be(std::span<const uint8_t> in) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | in[i];
    return v;
}

void put_u32le(std::span<uint8_t> out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out[i] = uint8_t(v >> (8 * i));
}

uint32_t get_u32le(std::span<const uint8_t> in) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = v << 8 | in[i];
    return v;
}

void put_u64le(std::span<uint8_t> out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out[i] = uint8_t(v >> (8 * i));
}

uint64_t get_u64le(std::span<const uint8_t> in) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | in[i];
    return v;
}

}  // namespace inuksuk
