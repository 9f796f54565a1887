#include "inuksuk/sed_device.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "inuksuk/crypto.hpp"
#include "json.hpp"

namespace inuksuk {

SedDevice::SedDevice(uint64_t sector_count, Bytes psid, Bytes admin_credential)
    : sector_count_(sector_count),
      sectors_(sector_count * kSectorSize, 0),
      psid_(std::move(psid)),
      admin_credential_(std::move(admin_credential)) {}

const LockingRange* SedDevice::find_range(uint32_t range_id) const {
    for (const auto& r : ranges_)
        if (r.range_id == range_id) return &r;
    return nullptr;
}

void SedDevice::log(SedCommand cmd) const { log_.push_back(std::move(cmd)); }

Result<uint32_t> SedDevice::configure_range(std::span<const uint8_t> admin_credential, uint64_t start_lba,
                                            uint64_t length, bool write_lock_enabled, bool read_lock_enabled,
                                            std::span<const uint8_t> credential) {
    SedCommand cmd{.verb = "configure_range", .lba = start_lba, .count = length};
    if (!crypto::ct_equal(admin_credential, admin_credential_)) {
        cmd.error = err_name(Err::BadCredential);
        log(cmd);
        return error(Err::BadCredential, "admin credential rejected");
    }
    if (length < 1 || start_lba + length > sector_count_ || start_lba + length < start_lba) {
        cmd.error = err_name(Err::OutOfBounds);
        log(cmd);
        return error(Err::OutOfBounds, "range outside sector store");
    }
    for (const auto& r : ranges_) {
        if (r.overlaps(start_lba, length)) {
            cmd.error = err_name(Err::OverlappingRange);
            log(cmd);
            return error(Err::OverlappingRange, "overlaps range " + std::to_string(r.range_id));
        }
    }
    if (credential.size() != kCredentialBytes) {
        cmd.error = err_name(Err::BadCredential);
        log(cmd);
        return error(Err::BadCredential, "credential must be 32 bytes");
    }
    LockingRange r;
    r.range_id = next_range_id_++;
    r.start_lba = start_lba;
    r.length = length;
    r.write_lock_enabled = write_lock_enabled;
    r.read_lock_enabled = read_lock_enabled;
    r.write_locked = write_lock_enabled;
    r.read_locked = read_lock_enabled;
    r.credential.assign(credential.begin(), credential.end());
    ranges_.push_back(std::move(r));
    cmd.range_id = ranges_.back().range_id;
    cmd.accepted = true;
    log(cmd);
    return ranges_.back().range_id;
}

Result<void> SedDevice::unlock_write(uint32_t range_id, std::span<const uint8_t> credential) {
    SedCommand cmd{.verb = "unlock_write", .range_id = range_id};
    auto* r = const_cast<LockingRange*>(find_range(range_id));
    if (!r) {
        cmd.error = err_name(Err::NoSuchRange);
        log(cmd);
        return error(Err::NoSuchRange, std::to_string(range_id));
    }
    if (!crypto::ct_equal(credential, r->credential)) {
        cmd.error = err_name(Err::BadCredential);
        log(cmd);
        return error(Err::BadCredential, "unlock rejected");
    }
    r->write_locked = false;
    cmd.accepted = true;
    log(cmd);
    return {};
}

Result<void> SedDevice::lock_write(uint32_t range_id, std::span<const uint8_t> credential) {
    SedCommand cmd{.verb = "lock_write", .range_id = range_id};
    auto* r = const_cast<LockingRange*>(find_range(range_id));
    if (!r) {
        cmd.error = err_name(Err::NoSuchRange);
        log(cmd);
        return error(Err::NoSuchRange, std::to_string(range_id));
    }
    if (!crypto::ct_equal(credential, r->credential)) {
        cmd.error = err_name(Err::BadCredential);
        log(cmd);
        return error(Err::BadCredential, "lock rejected");
    }
    if (r->write_lock_enabled) r->write_locked = true;
    cmd.accepted = true;
    log(cmd);
    return {};
}

bool SedDevice::write_allowed(uint64_t lba, int64_t* blocking_range) const {
    for (const auto& r : ranges_) {
        if (r.covers(lba)) {
            if (r.write_locked) {
                if (blocking_range) *blocking_range = r.range_id;
                return false;
            }
            return true;
        }
    }
    return true;  // global range
}

Result<void> SedDevice::write_sectors(uint64_t lba, std::span<const uint8_t> data) {
    SedCommand cmd{.verb = "write", .lba = lba, .count = data.size() / kSectorSize};
    if (data.size() % kSectorSize != 0) {
        cmd.error = err_name(Err::OutOfBounds);
        log(cmd);
        return error(Err::OutOfBounds, "write length not sector-aligned");
    }
    uint64_t count = data.size() / kSectorSize;
    if (lba + count > sector_count_ || lba + count < lba) {
        cmd.error = err_name(Err::OutOfBounds);
        log(cmd);
        return error(Err::OutOfBounds, "write past end of store");
    }
    // All-or-nothing: check every touched sector before mutating any.
    for (uint64_t i = 0; i < count; ++i) {
        int64_t blocker = -1;
        if (!write_allowed(lba + i, &blocker)) {
            cmd.error = err_name(Err::WriteLocked);
            cmd.range_id = blocker;
            log(cmd);
            return error(Err::WriteLocked, "sector " + std::to_string(lba + i) + " locked", blocker);
        }
    }
    std::copy(data.begin(), data.end(), sectors_.begin() + lba * kSectorSize);
    cmd.accepted = true;
    log(cmd);
    return {};
}

Result<Bytes> SedDevice::read_sectors(uint64_t lba, uint64_t count) const {
    SedCommand cmd{.verb = "read", .lba = lba, .count = count};
    if (lba + count > sector_count_ || lba + count < lba) {
        cmd.error = err_name(Err::OutOfBounds);
        log(cmd);
        return error(Err::OutOfBounds, "read past end of store");
    }
    for (const auto& r : ranges_) {
        if (r.read_locked && r.overlaps(lba, count)) {
            cmd.error = err_name(Err::ReadLocked);
            cmd.range_id = r.range_id;
            log(cmd);
            return error(Err::ReadLocked, "range read-locked", r.range_id);
        }
    }
    Bytes out(sectors_.begin() + lba * kSectorSize, sectors_.begin() + (lba + count) * kSectorSize);
    cmd.accepted = true;
    log(cmd);
    return out;
}

Result<void> SedDevice::psid_revert(std::span<const uint8_t> psid) {
    SedCommand cmd{.verb = "psid_revert"};
    if (!crypto::ct_equal(psid, psid_)) {
        cmd.error = err_name(Err::BadPsid);
        log(cmd);
        return error(Err::BadPsid, "psid rejected");
    }
    std::fill(sectors_.begin(), sectors_.end(), 0);
    ranges_.clear();
    next_range_id_ = 1;
    cmd.accepted = true;
    log(cmd);
    return {};
}

void SedDevice::power_cycle() {
    for (auto& r : ranges_) {
        if (r.write_lock_enabled) r.write_locked = true;
        if (r.read_lock_enabled) r.read_locked = true;
    }
    log(SedCommand{.verb = "power_cycle", .accepted = true});
}

Digest SedDevice::store_digest() const { return crypto::sha256(sectors_); }

void SedDevice::export_image(const std::string& image_path, const std::string& sidecar_path) const {
    std::ofstream img(image_path, std::ios::binary | std::ios::trunc);
    img.write(reinterpret_cast<const char*>(sectors_.data()), std::streamsize(sectors_.size()));
    if (!img) throw std::runtime_error("cannot write image: " + image_path);

    nlohmann::json meta;
    meta["sector_size"] = kSectorSize;
    meta["sector_count"] = sector_count_;
    meta["ranges"] = nlohmann::json::array();
    for (const auto& r : ranges_) {
        meta["ranges"].push_back({{"range_id", r.range_id},
                                  {"start_lba", r.start_lba},
                                  {"length", r.length},
                                  {"write_lock_enabled", r.write_lock_enabled},
                                  {"read_lock_enabled", r.read_lock_enabled},
                                  {"write_locked", r.write_locked},
                                  {"read_locked", r.read_locked}});
    }
    std::ofstream side(sidecar_path, std::ios::trunc);
    side << meta.dump(2) << "\n";
    if (!side) throw std::runtime_error("cannot write sidecar: " + sidecar_path);
}

SedDevice SedDevice::import_image(const std::string& image_path, const std::string& sidecar_path,
                                  Bytes psid, Bytes admin_credential) {
    std::ifstream side(sidecar_path);
    if (!side) throw std::runtime_error("cannot read sidecar: " + sidecar_path);
    nlohmann::json meta = nlohmann::json::parse(side);

    uint64_t sector_count = meta.at("sector_count").get<uint64_t>();
    SedDevice dev(sector_count, std::move(psid), std::move(admin_credential));

    std::ifstream img(image_path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot read image: " + image_path);
    img.read(reinterpret_cast<char*>(dev.sectors_.data()), std::streamsize(dev.sectors_.size()));
    if (img.gcount() != std::streamsize(dev.sectors_.size()))
        throw std::runtime_error("image truncated: " + image_path);

    // Imported ranges come back without credentials; they stay locked until
    // re-provisioned. The sidecar deliberately never carries secrets.
    for (const auto& jr : meta.at("ranges")) {
        LockingRange r;
        r.range_id = jr.at("range_id").get<uint32_t>();
        r.start_lba = jr.at("start_lba").get<uint64_t>();
        r.length = jr.at("length").get<uint64_t>();
        r.write_lock_enabled = jr.at("write_lock_enabled").get<bool>();
        r.read_lock_enabled = jr.at("read_lock_enabled").get<bool>();
        r.write_locked = jr.at("write_locked").get<bool>();
        r.read_locked = jr.at("read_locked").get<bool>();
        dev.ranges_.push_back(std::move(r));
        dev.next_range_id_ = std::max(dev.next_range_id_, dev.ranges_.back().range_id + 1);
    }
    return dev;
}

void SedDevice::load_raw_sectors(Bytes sectors) {
    if (sectors.size() != sectors_.size()) throw std::runtime_error("sector image size mismatch");
    sectors_ = std::move(sectors);
}

void SedDevice::restore_ranges(std::vector<LockingRange> ranges, uint32_t next_range_id) {
    ranges_ = std::move(ranges);
    next_range_id_ = next_range_id;
}

}  // namespace inuksuk
