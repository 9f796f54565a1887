#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace inuksuk {

using Bytes = std::vector<uint8_t>;
using Digest = std::array<uint8_t, 32>;

Bytes to_bytes(const std::string& s);
std::string to_string(std::span<const uint8_t> b);

std::string hex_encode(std::span<const uint8_t> b);
// Returns empty vector on odd length or non-hex characters ("" decodes to {}).
Bytes hex_decode(const std::string& hex);

inline Bytes concat(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    Bytes out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

// Fixed-width big-endian encoding, used by wire formats (time tokens, fs metadata).
void put_u64be(std::span<uint8_t> out, uint64_t v);
uint64_t get_u64be(std::span<const uint8_t> in);
void put_u32le(std::span<uint8_t> out, uint32_t v);
uint32_t get_u32le(std::span<const uint8_t> in);
void put_u64le(std::span<uint8_t> out, uint64_t v);
uint64_t get_u64le(std::span<const uint8_t> in);

}  // namespace inuksuk
