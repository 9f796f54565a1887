// Test-only reference models, kept independent of the implementation paths
// they check.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inuksuk/bytes.hpp"
#include "inuksuk/crypto.hpp"

namespace oracle {

using inuksuk::Bytes;
using inuksuk::Digest;

// ---------------------------------------------------------------------------
// Brute-force SED permission model: its own byte map, its own range
// bookkeeping, its own accept/reject rules.
// ---------------------------------------------------------------------------

struct RefRange {
    uint64_t start = 0;
    uint64_t length = 0;
    bool write_lock_enabled = false;
    bool read_lock_enabled = false;
    bool write_locked = false;
    bool read_locked = false;
    Bytes credential;
};

class RefSed {
public:
    explicit RefSed(uint64_t sector_count) : sector_count_(sector_count) {}

    bool configure_range(const Bytes& admin, const Bytes& real_admin, uint64_t start, uint64_t len,
                         bool wle, bool rle, const Bytes& cred) {
        if (admin != real_admin) return false;
        if (len < 1 || start + len > sector_count_) return false;
        for (const auto& [id, r] : ranges_)
            if (start < r.start + r.length && r.start < start + len) return false;
        if (cred.size() != 32) return false;
        RefRange r{start, len, wle, rle, wle, rle, cred};
        ranges_[next_id_++] = r;
        return true;
    }

    bool unlock_write(uint32_t id, const Bytes& cred) {
        auto it = ranges_.find(id);
        if (it == ranges_.end() || it->second.credential != cred) return false;
        it->second.write_locked = false;
        return true;
    }

    bool lock_write(uint32_t id, const Bytes& cred) {
        auto it = ranges_.find(id);
        if (it == ranges_.end() || it->second.credential != cred) return false;
        if (it->second.write_lock_enabled) it->second.write_locked = true;
        return true;
    }

    bool write(uint64_t lba, const Bytes& data) {
        if (data.size() % 512 != 0) return false;
        uint64_t count = data.size() / 512;
        if (lba + count > sector_count_) return false;
        for (uint64_t i = 0; i < count; ++i)
            for (const auto& [id, r] : ranges_)
                if (lba + i >= r.start && lba + i < r.start + r.length && r.write_locked) return false;
        for (uint64_t i = 0; i < count; ++i) {
            Bytes sector(data.begin() + i * 512, data.begin() + (i + 1) * 512);
            sectors_[lba + i] = sector;
        }
        return true;
    }

    bool read(uint64_t lba, uint64_t count, Bytes* out) const {
        if (lba + count > sector_count_) return false;
        for (const auto& [id, r] : ranges_)
            if (r.read_locked && lba < r.start + r.length && r.start < lba + count) return false;
        if (out) {
            out->clear();
            for (uint64_t i = 0; i < count; ++i) {
                auto it = sectors_.find(lba + i);
                if (it != sectors_.end())
                    out->insert(out->end(), it->second.begin(), it->second.end());
                else
                    out->insert(out->end(), 512, 0);
            }
        }
        return true;
    }

    bool psid_revert(const Bytes& psid, const Bytes& real_psid) {
        if (psid != real_psid) return false;
        sectors_.clear();
        ranges_.clear();
        next_id_ = 1;
        return true;
    }

    void power_cycle() {
        for (auto& [id, r] : ranges_) {
            if (r.write_lock_enabled) r.write_locked = true;
            if (r.read_lock_enabled) r.read_locked = true;
        }
    }

    Digest digest() const {
        Bytes all(sector_count_ * 512, 0);
        for (const auto& [lba, bytes] : sectors_)
            std::copy(bytes.begin(), bytes.end(), all.begin() + lba * 512);
        return inuksuk::crypto::sha256(all);
    }

    const std::map<uint32_t, RefRange>& ranges() const { return ranges_; }

private:
    uint64_t sector_count_;
    std::map<uint64_t, Bytes> sectors_;
    std::map<uint32_t, RefRange> ranges_;
    uint32_t next_id_ = 1;
};

// ---------------------------------------------------------------------------
// PCR extend chain recomputed from the raw definition.
// ---------------------------------------------------------------------------

inline Digest extend_chain(const std::vector<Digest>& measurements) {
    Digest acc{};
    for (const auto& m : measurements) {
        Bytes buf(acc.begin(), acc.end());
        buf.insert(buf.end(), m.begin(), m.end());
        acc = inuksuk::crypto::sha256(buf);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Closed-form allocation cost for the naive scan-from-zero allocator: every
// appended cluster walks the full table, so a k-cluster file on an N-cluster
// image costs exactly k*N probes. The cursor allocator wraps at most once, so
// its cost is bounded by N + k.
// ---------------------------------------------------------------------------

inline uint64_t naive_probe_cost(uint64_t k_clusters, uint64_t n_clusters) {
    uint64_t total = 0;
    for (uint64_t i = 0; i < k_clusters; ++i) total += n_clusters;  // i-th scan length
    return total;
}

inline uint64_t cursor_probe_bound(uint64_t k_clusters, uint64_t n_clusters) {
    return n_clusters + k_clusters;
}

// ---------------------------------------------------------------------------
// In-memory byte-map mirror of a flat filesystem.
// ---------------------------------------------------------------------------

struct FileMirror {
    std::map<std::string, Bytes> files;

    bool create(const std::string& name, const Bytes& content) {
        if (files.count(name)) return false;
        files[name] = content;
        return true;
    }
    bool overwrite(const std::string& name, const Bytes& content) {
        if (!files.count(name)) return false;
        files[name] = content;
        return true;
    }
    bool remove(const std::string& name) { return files.erase(name) > 0; }
    bool rename(const std::string& from, const std::string& to) {
        if (!files.count(from) || files.count(to)) return false;
        files[to] = files[from];
        files.erase(from);
        return true;
    }
    std::optional<Bytes> read(const std::string& name) const {
        auto it = files.find(name);
        if (it == files.end()) return std::nullopt;
        return it->second;
    }
};

}  // namespace oracle
