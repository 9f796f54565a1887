#include "inuksuk/time_authority.hpp"

#include "inuksuk/crypto.hpp"

namespace inuksuk {

Bytes TimeToken::payload() const {
    Bytes buf(8 + kTokenNonceBytes);
    put_u64be(std::span(buf).subspan(0, 8), time);
    std::copy(nonce.begin(), nonce.end(), buf.begin() + 8);
    return buf;
}

Bytes TimeToken::serialize() const {
    Bytes out = payload();
    out.insert(out.end(), signature.begin(), signature.end());
    return out;
}

std::string TimeToken::to_hex() const { return hex_encode(serialize()); }

Result<TimeToken> TimeToken::deserialize(std::span<const uint8_t> in) {
    if (in.size() != 8 + kTokenNonceBytes + crypto::kSigBytes)
        return error(Err::BadSignature, "token length");
    TimeToken t;
    t.time = get_u64be(in.subspan(0, 8));
    t.nonce.assign(in.begin() + 8, in.begin() + 8 + kTokenNonceBytes);
    t.signature.assign(in.begin() + 8 + kTokenNonceBytes, in.end());
    return t;
}

Result<TimeToken> TimeToken::from_hex(const std::string& hex) {
    Bytes raw = hex_decode(hex);
    if (raw.empty() && !hex.empty()) return error(Err::BadSignature, "token hex");
    return deserialize(raw);
}

TimeAuthority::TimeAuthority(std::span<const uint8_t> key_seed32) {
    auto kp = crypto::sign_keypair_from_seed(key_seed32);
    public_key_ = std::move(kp.public_key);
    secret_key_ = std::move(kp.secret_key);
}

TimeToken TimeAuthority::issue(uint64_t time, DetRng& rng) const {
    TimeToken t;
    t.time = time;
    t.nonce = rng.bytes(kTokenNonceBytes);
    t.signature = crypto::sign_detached(t.payload(), secret_key_);
    return t;
}

Result<uint64_t> verify_token(const TimeToken& token, std::span<const uint8_t> public_key,
                              uint64_t last_accepted) {
    if (token.nonce.size() != kTokenNonceBytes || !crypto::sign_verify(token.payload(), token.signature, public_key))
        return error(Err::BadSignature, "token signature");
    if (token.time <= last_accepted)
        return error(Err::StaleToken, "token time " + std::to_string(token.time) +
                                          " <= last accepted " + std::to_string(last_accepted));
    return token.time;
}

}  // namespace inuksuk
