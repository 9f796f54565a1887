#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "inuksuk/block_device.hpp"
#include "inuksuk/result.hpp"
#include "inuksuk/tee_runtime.hpp"
#include "inuksuk/trace.hpp"
#include "inuksuk/trusted_updater.hpp"
#include "inuksuk/vault_fs.hpp"

namespace inuksuk {

struct OriginalFile {
    Bytes content;
    uint64_t modified = 0;
    uint32_t mods_since_commit = 0;  // write count, feeds anomaly detection
};

struct Schedule {
    uint64_t interval = 8 * 3600;
    uint64_t next_fire = 0;
    bool manual_trigger_pending = false;
};

struct CommitTrigger {
    bool manual = false;
    uint64_t fired_at = 0;
};

// The untrusted side: freely mutable original files plus the driver that
// schedules TEE sessions. Everything here is fair game for the adversary.
class HostWorld {
public:
    HostWorld(TeeRuntime& tee, Trace& trace, SimClock& clock) : tee_(tee), trace_(trace), clock_(clock) {}

    Result<void> app_write(const std::string& name, Bytes content, uint64_t now);
    Result<void> app_autosave_storm(const std::string& name, uint32_t count, Bytes final_content, uint64_t now);
    Result<void> app_delete(const std::string& name, uint64_t now);

    std::vector<OriginalFileInfo> listing() const;
    void reset_mod_counts();

    std::optional<CommitTrigger> tick(uint64_t now);
    void trigger_manual() { schedule_.manual_trigger_pending = true; }
    void kill_driver() { driver_killed_ = true; }  // malicious termination
    bool driver_killed() const { return driver_killed_; }

    std::map<std::string, OriginalFile>& files() { return files_; }
    const std::map<std::string, OriginalFile>& files() const { return files_; }
    Schedule& schedule() { return schedule_; }
    const Schedule& schedule() const { return schedule_; }

    std::optional<std::string> plaintext_policy;

    // Simulated OS wipe: originals and plaintext policy gone; the SED's
    // unprotected region is zeroed by the caller.
    void wipe();

private:
    TeeRuntime& tee_;
    Trace& trace_;
    SimClock& clock_;
    std::map<std::string, OriginalFile> files_;
    Schedule schedule_;
    bool driver_killed_ = false;
};

// Credential-free read-only view over the protected filesystem, usable on any
// machine that can read sectors. No mutating member exists on this type.
class RecoveryView {
public:
    static Result<RecoveryView> mount(const SedDevice& sed, uint64_t base_lba, uint64_t length);

    std::vector<DirEntry> list(bool show_hidden = true) const { return fs_->list(show_hidden); }
    Result<Bytes> read_file(const std::string& name) const { return fs_->read_file(name); }

private:
    RecoveryView() = default;
    std::unique_ptr<ReadOnlySedRegion> region_;
    std::unique_ptr<VaultFs> fs_;
};

}  // namespace inuksuk
