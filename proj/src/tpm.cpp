#include "inuksuk/tpm.hpp"

#include <algorithm>

#include "inuksuk/crypto.hpp"

namespace inuksuk {

namespace {
Bytes encode_bindings(const std::vector<PcrBinding>& bindings) {
    std::vector<PcrBinding> sorted = bindings;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    Bytes buf;
    for (const auto& b : sorted) {
        buf.push_back(uint8_t(b.index));
        buf.insert(buf.end(), b.expected.begin(), b.expected.end());
    }
    return buf;
}
}  // namespace

Tpm::Tpm(Bytes device_root_secret) : pcrs_(kPcrCount, Digest{}), root_secret_(std::move(device_root_secret)) {}

Result<Digest> Tpm::pcr_extend(uint32_t index, const Digest& measurement) {
    if (index >= kPcrCount) return error(Err::BadIndex, "pcr " + std::to_string(index));
    Bytes chained(pcrs_[index].begin(), pcrs_[index].end());
    chained.insert(chained.end(), measurement.begin(), measurement.end());
    pcrs_[index] = crypto::sha256(chained);
    return pcrs_[index];
}

Result<void> Tpm::pcr_reset(uint32_t index) {
    if (index >= kPcrCount) return error(Err::BadIndex, "pcr " + std::to_string(index));
    pcrs_[index] = Digest{};
    return {};
}

Digest Tpm::policy_digest(const std::vector<PcrBinding>& bindings) {
    return crypto::sha256(encode_bindings(bindings));
}

bool Tpm::policy_satisfied(const std::vector<PcrBinding>& policy) const {
    for (const auto& b : policy) {
        if (b.index >= kPcrCount) return false;
        if (!crypto::ct_equal(pcrs_[b.index], b.expected)) return false;
    }
    return true;
}

Digest Tpm::seal_key(const Digest& policy_digest) const {
    Bytes material = root_secret_;
    material.insert(material.end(), policy_digest.begin(), policy_digest.end());
    const char* label = "inuksuk.seal.v1";
    material.insert(material.end(), label, label + 15);
    return crypto::sha256(material);
}

Result<SealedBlob> Tpm::seal(std::span<const uint8_t> plaintext, const std::vector<PcrBinding>& bindings,
                             std::span<const uint8_t> nonce24) {
    if (plaintext.empty()) return error(Err::BadIndex, "empty plaintext");
    for (const auto& b : bindings)
        if (b.index >= kPcrCount) return error(Err::BadIndex, "pcr " + std::to_string(b.index));

    SealedBlob blob;
    blob.policy_digest = policy_digest(bindings);
    for (const auto& b : bindings) blob.pcr_indices.push_back(b.index);
    std::sort(blob.pcr_indices.begin(), blob.pcr_indices.end());
    blob.boxed = crypto::aead_seal(seal_key(blob.policy_digest), plaintext, nonce24);
    return blob;
}

Result<Bytes> Tpm::unseal(const SealedBlob& blob) const {
    // Recompute the policy digest from the current bank; mismatch means some
    // bound register drifted from its seal-time expected value.
    std::vector<PcrBinding> current;
    for (uint32_t idx : blob.pcr_indices) {
        if (idx >= kPcrCount) return error(Err::CorruptBlob, "pcr index out of range");
        current.push_back(PcrBinding{idx, pcrs_[idx]});
    }
    Digest now = policy_digest(current);
    if (!crypto::ct_equal(now, blob.policy_digest)) return error(Err::PolicyMismatch, "pcr state diverged");

    auto opened = crypto::aead_open(seal_key(blob.policy_digest), blob.boxed);
    if (!opened) return error(Err::CorruptBlob, "integrity tag failure");
    return *opened;
}

Result<void> Tpm::nvram_define(uint32_t index, std::vector<PcrBinding> read_policy) {
    for (const auto& b : read_policy)
        if (b.index >= kPcrCount) return error(Err::BadIndex, "pcr " + std::to_string(b.index));
    NvramSlot slot;
    slot.index = index;
    slot.read_policy = std::move(read_policy);
    slot.defined = true;
    nvram_[index] = std::move(slot);
    return {};
}

Result<void> Tpm::nvram_write(uint32_t index, Bytes data) {
    auto it = nvram_.find(index);
    if (it == nvram_.end()) return error(Err::Undefined, "nvram " + std::to_string(index));
    it->second.data = std::move(data);
    return {};
}

Result<Bytes> Tpm::nvram_read(uint32_t index) const {
    auto it = nvram_.find(index);
    if (it == nvram_.end()) return error(Err::Undefined, "nvram " + std::to_string(index));
    if (!policy_satisfied(it->second.read_policy))
        return error(Err::PolicyMismatch, "nvram read policy not satisfied");
    return it->second.data;
}

void Tpm::reset_on_boot() {
    for (auto& p : pcrs_) p = Digest{};
}

Bytes SealedBlob::serialize() const {
    Bytes out;
    out.push_back(uint8_t(pcr_indices.size()));
    for (uint32_t idx : pcr_indices) out.push_back(uint8_t(idx));
    out.insert(out.end(), policy_digest.begin(), policy_digest.end());
    out.insert(out.end(), boxed.begin(), boxed.end());
    return out;
}

Result<SealedBlob> SealedBlob::deserialize(std::span<const uint8_t> in) {
    if (in.size() < 1) return error(Err::CorruptBlob, "short blob");
    size_t n = in[0];
    if (in.size() < 1 + n + 32) return error(Err::CorruptBlob, "short blob");
    SealedBlob blob;
    for (size_t i = 0; i < n; ++i) blob.pcr_indices.push_back(in[1 + i]);
    std::copy_n(in.begin() + 1 + n, 32, blob.policy_digest.begin());
    blob.boxed.assign(in.begin() + 1 + n + 32, in.end());
    return blob;
}

}  // namespace inuksuk
