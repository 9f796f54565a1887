#pragma once

#include <cstdint>
#include <string>

#include "inuksuk/bytes.hpp"
#include "inuksuk/result.hpp"
#include "inuksuk/rng.hpp"

namespace inuksuk {

// Signed timestamp standing in for a signed-NTP response. Wire format is
// fixed-order binary: 8-byte big-endian seconds, 16-byte nonce, signature.
struct TimeToken {
    uint64_t time = 0;
    Bytes nonce;      // 16 bytes
    Bytes signature;  // 64 bytes

    Bytes payload() const;  // time || nonce, the signed bytes
    Bytes serialize() const;
    std::string to_hex() const;
    static Result<TimeToken> deserialize(std::span<const uint8_t> in);
    static Result<TimeToken> from_hex(const std::string& hex);
};

constexpr size_t kTokenNonceBytes = 16;

// Local stand-in for the remote signed-time service. The signing key never
// leaves this actor; verification needs only the public key.
class TimeAuthority {
public:
    explicit TimeAuthority(std::span<const uint8_t> key_seed32);

    TimeToken issue(uint64_t time, DetRng& rng) const;
    const Bytes& public_key() const { return public_key_; }
    const Bytes& secret_key() const { return secret_key_; }

private:
    Bytes public_key_;
    Bytes secret_key_;
};

// Pure function of (token, key, last_accepted): token time is returned only
// when the signature checks out and the time strictly increases.
Result<uint64_t> verify_token(const TimeToken& token, std::span<const uint8_t> public_key,
                              uint64_t last_accepted);

}  // namespace inuksuk
