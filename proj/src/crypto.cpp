#include "inuksuk/crypto.hpp"

#include <sodium.h>

#include <cassert>
#include <mutex>
#include <stdexcept>

namespace inuksuk::crypto {

namespace {
void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
    });
}
}  // namespace

Digest sha256(std::span<const uint8_t> data) {
    ensure_sodium();
    Digest out{};
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Digest sha256(const Bytes& a, const Bytes& b) {
    ensure_sodium();
    Digest out{};
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, a.data(), a.size());
    crypto_hash_sha256_update(&st, b.data(), b.size());
    crypto_hash_sha256_final(&st, out.data());
    return out;
}

bool ct_equal(std::span<const uint8_t> a, std::span<const uint8_t> b) {
    ensure_sodium();
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

Bytes aead_seal(const Digest& key, std::span<const uint8_t> plaintext, std::span<const uint8_t> nonce24) {
    ensure_sodium();
    assert(nonce24.size() == crypto_secretbox_NONCEBYTES);
    Bytes out(crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES + plaintext.size());
    std::copy(nonce24.begin(), nonce24.end(), out.begin());
    crypto_secretbox_easy(out.data() + crypto_secretbox_NONCEBYTES, plaintext.data(), plaintext.size(),
                          nonce24.data(), key.data());
    return out;
}

std::optional<Bytes> aead_open(const Digest& key, std::span<const uint8_t> boxed) {
    ensure_sodium();
    if (boxed.size() < crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES) return std::nullopt;
    size_t ct_len = boxed.size() - crypto_secretbox_NONCEBYTES;
    Bytes out(ct_len - crypto_secretbox_MACBYTES);
    if (crypto_secretbox_open_easy(out.data(), boxed.data() + crypto_secretbox_NONCEBYTES, ct_len,
                                   boxed.data(), key.data()) != 0)
        return std::nullopt;
    return out;
}

SignKeyPair sign_keypair_from_seed(std::span<const uint8_t> seed32) {
    ensure_sodium();
    assert(seed32.size() == crypto_sign_SEEDBYTES);
    SignKeyPair kp;
    kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
    kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
    crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed32.data());
    return kp;
}

Bytes sign_detached(std::span<const uint8_t> payload, std::span<const uint8_t> secret_key) {
    ensure_sodium();
    Digest d = sha256(payload);
    Bytes sig(crypto_sign_BYTES);
    unsigned long long sig_len = 0;
    crypto_sign_detached(sig.data(), &sig_len, d.data(), d.size(), secret_key.data());
    sig.resize(sig_len);
    return sig;
}

bool sign_verify(std::span<const uint8_t> payload, std::span<const uint8_t> signature,
                 std::span<const uint8_t> public_key) {
    ensure_sodium();
    if (signature.size() != crypto_sign_BYTES || public_key.size() != crypto_sign_PUBLICKEYBYTES) return false;
    Digest d = sha256(payload);
    return crypto_sign_verify_detached(signature.data(), d.data(), d.size(), public_key.data()) == 0;
}

}  // namespace inuksuk::crypto
