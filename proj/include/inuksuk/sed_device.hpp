#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "inuksuk/bytes.hpp"
#include "inuksuk/result.hpp"

namespace inuksuk {

constexpr uint32_t kSectorSize = 512;
constexpr size_t kCredentialBytes = 32;

// One Opal-style locking range. Lock state is volatile (re-engages on power
// cycle); the enable flags and credential are provisioned state.
struct LockingRange {
    uint32_t range_id = 0;
    uint64_t start_lba = 0;
    uint64_t length = 0;  // sectors
    bool write_lock_enabled = false;
    bool read_lock_enabled = false;
    bool write_locked = false;
    bool read_locked = false;
    Bytes credential;  // 32 bytes

    bool covers(uint64_t lba) const { return lba >= start_lba && lba < start_lba + length; }
    bool overlaps(uint64_t start, uint64_t len) const {
        return start < start_lba + length && start_lba < start + len;
    }
};

// Device command log entry. Credentials are never recorded; the log is an
// observable artifact (oracle replay, fail-closed checks read it).
struct SedCommand {
    std::string verb;    // configure_range | unlock_write | lock_write | write | read | psid_revert | power_cycle
    uint64_t lba = 0;
    uint64_t count = 0;  // sectors
    int64_t range_id = -1;
    bool accepted = false;
    std::string error;   // err_name when rejected
};

// Emulated self-encrypting drive: flat sector store plus locking ranges with
// credential-gated write/read locks. LBAs outside every range form the global
// range and are always accessible.
class SedDevice {
public:
    SedDevice(uint64_t sector_count, Bytes psid, Bytes admin_credential);

    uint64_t sector_count() const { return sector_count_; }

    Result<uint32_t> configure_range(std::span<const uint8_t> admin_credential, uint64_t start_lba,
                                     uint64_t length, bool write_lock_enabled, bool read_lock_enabled,
                                     std::span<const uint8_t> credential);
    Result<void> unlock_write(uint32_t range_id, std::span<const uint8_t> credential);
    Result<void> lock_write(uint32_t range_id, std::span<const uint8_t> credential);
    Result<void> write_sectors(uint64_t lba, std::span<const uint8_t> data);
    Result<Bytes> read_sectors(uint64_t lba, uint64_t count) const;
    Result<void> psid_revert(std::span<const uint8_t> psid);
    void power_cycle();

    const std::vector<LockingRange>& ranges() const { return ranges_; }
    const LockingRange* find_range(uint32_t range_id) const;

    // Digest over sector contents only (log and range table excluded).
    Digest store_digest() const;

    const std::vector<SedCommand>& command_log() const { return log_; }
    void clear_command_log() { log_.clear(); }

    // Raw image plus sidecar metadata (JSON, no credentials).
    void export_image(const std::string& image_path, const std::string& sidecar_path) const;
    static SedDevice import_image(const std::string& image_path, const std::string& sidecar_path,
                                  Bytes psid, Bytes admin_credential);

    // State-file persistence needs the full internal state, credentials included.
    std::span<const uint8_t> raw_sectors() const { return sectors_; }
    void load_raw_sectors(Bytes sectors);
    void restore_ranges(std::vector<LockingRange> ranges, uint32_t next_range_id);
    uint32_t next_range_id() const { return next_range_id_; }

private:
    bool write_allowed(uint64_t lba, int64_t* blocking_range) const;
    void log(SedCommand cmd) const;

    uint64_t sector_count_;
    Bytes sectors_;
    std::vector<LockingRange> ranges_;
    Bytes psid_;
    Bytes admin_credential_;
    uint32_t next_range_id_ = 1;
    mutable std::vector<SedCommand> log_;
};

}  // namespace inuksuk
