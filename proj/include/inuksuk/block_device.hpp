#pragma once

#include <cstdint>
#include <span>

#include "inuksuk/result.hpp"
#include "inuksuk/sed_device.hpp"

namespace inuksuk {

// Sector-addressed backing store, LBA 0 = first sector of the region.
class BlockDevice {
public:
    virtual ~BlockDevice() = default;
    virtual Result<Bytes> read(uint64_t lba, uint64_t count) const = 0;
    virtual Result<void> write(uint64_t lba, std::span<const uint8_t> data) = 0;
    virtual uint64_t sector_count() const = 0;
};

// Window onto a SED: maps region-relative LBAs onto [base, base+length).
class SedRegion : public BlockDevice {
public:
    SedRegion(SedDevice& sed, uint64_t base_lba, uint64_t length)
        : sed_(sed), base_(base_lba), length_(length) {}

    Result<Bytes> read(uint64_t lba, uint64_t count) const override {
        if (lba + count > length_) return error(Err::OutOfBounds, "region read");
        return sed_.read_sectors(base_ + lba, count);
    }
    Result<void> write(uint64_t lba, std::span<const uint8_t> data) override {
        if (lba + data.size() / kSectorSize > length_) return error(Err::OutOfBounds, "region write");
        return sed_.write_sectors(base_ + lba, data);
    }
    uint64_t sector_count() const override { return length_; }

private:
    SedDevice& sed_;
    uint64_t base_;
    uint64_t length_;
};

// Recovery-path adapter: holds the device by const reference, so the write
// path cannot be reached from here at all.
class ReadOnlySedRegion : public BlockDevice {
public:
    ReadOnlySedRegion(const SedDevice& sed, uint64_t base_lba, uint64_t length)
        : sed_(sed), base_(base_lba), length_(length) {}

    Result<Bytes> read(uint64_t lba, uint64_t count) const override {
        if (lba + count > length_) return error(Err::OutOfBounds, "region read");
        return sed_.read_sectors(base_ + lba, count);
    }
    Result<void> write(uint64_t, std::span<const uint8_t>) override {
        return error(Err::WriteLocked, "read-only view");
    }
    uint64_t sector_count() const override { return length_; }

private:
    const SedDevice& sed_;
    uint64_t base_;
    uint64_t length_;
};

}  // namespace inuksuk
