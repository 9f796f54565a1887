#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "inuksuk/bytes.hpp"
#include "inuksuk/result.hpp"

namespace inuksuk {

constexpr size_t kPcrCount = 24;
// Late-launch measurement register, reset-then-extended by the TEE runtime.
constexpr uint32_t kLaunchPcr = 17;

struct PcrBinding {
    uint32_t index;
    Digest expected;
};

// Measurement-bound ciphertext. The policy digest commits to the bound
// (index, value) set; the key is derived from (device root secret, policy
// digest) so decryption is possible only when the bank reproduces the digest.
struct SealedBlob {
    std::vector<uint32_t> pcr_indices;  // sorted
    Digest policy_digest{};
    Bytes boxed;  // nonce || ciphertext || tag

    Bytes serialize() const;
    static Result<SealedBlob> deserialize(std::span<const uint8_t> in);
};

struct NvramSlot {
    uint32_t index = 0;
    Bytes data;
    std::vector<PcrBinding> read_policy;
    bool defined = false;
};

class Tpm {
public:
    explicit Tpm(Bytes device_root_secret);

    Result<Digest> pcr_extend(uint32_t index, const Digest& measurement);
    Result<void> pcr_reset(uint32_t index);  // late-launch dynamic reset, used by the TEE runtime
    const Digest& pcr_value(uint32_t index) const { return pcrs_.at(index); }

    Result<SealedBlob> seal(std::span<const uint8_t> plaintext, const std::vector<PcrBinding>& bindings,
                            std::span<const uint8_t> nonce24);
    Result<Bytes> unseal(const SealedBlob& blob) const;

    Result<void> nvram_define(uint32_t index, std::vector<PcrBinding> read_policy);
    Result<void> nvram_write(uint32_t index, Bytes data);
    Result<Bytes> nvram_read(uint32_t index) const;
    bool nvram_defined(uint32_t index) const { return nvram_.count(index) != 0; }

    // Platform reset: PCRs return to boot values, NVRAM and root secret persist.
    void reset_on_boot();

    // Digest the current PCR values at the given indices, in sorted index
    // order. Sealing against explicit expected values uses the same encoding.
    static Digest policy_digest(const std::vector<PcrBinding>& bindings);
    bool policy_satisfied(const std::vector<PcrBinding>& policy) const;

    // State-file persistence.
    const Bytes& root_secret() const { return root_secret_; }
    const std::map<uint32_t, NvramSlot>& nvram() const { return nvram_; }
    void restore_nvram(std::map<uint32_t, NvramSlot> slots) { nvram_ = std::move(slots); }

private:
    Digest seal_key(const Digest& policy_digest) const;

    std::vector<Digest> pcrs_;
    std::map<uint32_t, NvramSlot> nvram_;
    Bytes root_secret_;
};

}  // namespace inuksuk
