#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "inuksuk/bytes.hpp"

namespace inuksuk::crypto {

// Signature scheme identity; the rest of the code never assumes a scheme.
inline constexpr const char* kSignatureScheme = "ed25519-sha256";

Digest sha256(std::span<const uint8_t> data);
Digest sha256(const Bytes& a, const Bytes& b);

// Constant-time equality over equal-length buffers; false on length mismatch.
bool ct_equal(std::span<const uint8_t> a, std::span<const uint8_t> b);

// Authenticated encryption (XSalsa20-Poly1305). The nonce is prepended to the
// returned ciphertext; open() fails on any bit flip of nonce, body or tag.
Bytes aead_seal(const Digest& key, std::span<const uint8_t> plaintext, std::span<const uint8_t> nonce24);
std::optional<Bytes> aead_open(const Digest& key, std::span<const uint8_t> boxed);

constexpr size_t kAeadNonceBytes = 24;
constexpr size_t kSigBytes = 64;
constexpr size_t kSignPublicKeyBytes = 32;
constexpr size_t kSignSecretKeyBytes = 64;

struct SignKeyPair {
    Bytes public_key;  // 32 bytes
    Bytes secret_key;  // 64 bytes
};

// Deterministic keypair from a 32-byte seed (simulation determinism).
SignKeyPair sign_keypair_from_seed(std::span<const uint8_t> seed32);
// Signs sha256(payload); verification is deterministic.
Bytes sign_detached(std::span<const uint8_t> payload, std::span<const uint8_t> secret_key);
bool sign_verify(std::span<const uint8_t> payload, std::span<const uint8_t> signature,
                 std::span<const uint8_t> public_key);

}  // namespace inuksuk::crypto
