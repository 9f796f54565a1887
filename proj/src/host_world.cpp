#include "inuksuk/host_world.hpp"

namespace inuksuk {

Result<void> HostWorld::app_write(const std::string& name, Bytes content, uint64_t now) {
    if (tee_.session_active()) {
        trace_.append(now, TraceWorld::Harness, "suspended_reject", "app_write " + name);
        return error(Err::WorldSuspended, "host world suspended during TEE session");
    }
    auto& f = files_[name];
    f.content = std::move(content);
    f.modified = now;
    f.mods_since_commit += 1;
    trace_.append(now, TraceWorld::Host, "app_write", name);
    return {};
}

Result<void> HostWorld::app_autosave_storm(const std::string& name, uint32_t count, Bytes final_content,
                                           uint64_t now) {
    if (tee_.session_active()) {
        trace_.append(now, TraceWorld::Harness, "suspended_reject", "app_autosave_storm " + name);
        return error(Err::WorldSuspended, "host world suspended during TEE session");
    }
    auto& f = files_[name];
    // Intermediate states are overwritten in place; only the last survives.
    f.content = std::move(final_content);
    f.modified = now;
    f.mods_since_commit += count;
    trace_.append(now, TraceWorld::Host, "app_autosave_storm", name + " x" + std::to_string(count));
    return {};
}

Result<void> HostWorld::app_delete(const std::string& name, uint64_t now) {
    if (tee_.session_active()) {
        trace_.append(now, TraceWorld::Harness, "suspended_reject", "app_delete " + name);
        return error(Err::WorldSuspended, "host world suspended during TEE session");
    }
    files_.erase(name);
    trace_.append(now, TraceWorld::Host, "app_delete", name);
    return {};
}

std::vector<OriginalFileInfo> HostWorld::listing() const {
    std::vector<OriginalFileInfo> out;
    out.reserve(files_.size());
    for (const auto& [name, f] : files_)
        out.push_back(OriginalFileInfo{name, f.content, f.modified, f.mods_since_commit});
    return out;
}

void HostWorld::reset_mod_counts() {
    for (auto& [name, f] : files_) f.mods_since_commit = 0;
}

std::optional<CommitTrigger> HostWorld::tick(uint64_t now) {
    if (tee_.session_active()) return std::nullopt;  // scheduler defers
    if (driver_killed_) return std::nullopt;
    if (schedule_.manual_trigger_pending) {
        schedule_.manual_trigger_pending = false;
        trace_.append(now, TraceWorld::Host, "commit_trigger", "manual");
        return CommitTrigger{true, now};
    }
    if (schedule_.interval > 0 && schedule_.next_fire > 0 && now >= schedule_.next_fire) {
        schedule_.next_fire += schedule_.interval;
        trace_.append(now, TraceWorld::Host, "commit_trigger", "scheduled");
        return CommitTrigger{false, now};
    }
    return std::nullopt;
}

void HostWorld::wipe() {
    files_.clear();
    plaintext_policy.reset();
}

Result<RecoveryView> RecoveryView::mount(const SedDevice& sed, uint64_t base_lba, uint64_t length) {
    RecoveryView view;
    view.region_ = std::make_unique<ReadOnlySedRegion>(sed, base_lba, length);
    auto fs = VaultFs::open(*view.region_);
    if (!fs.ok()) return fs.err();
    view.fs_ = std::make_unique<VaultFs>(std::move(fs).take());
    return view;
}

}  // namespace inuksuk
