#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inuksuk/block_device.hpp"
#include "inuksuk/bytes.hpp"
#include "inuksuk/result.hpp"

namespace inuksuk {

constexpr uint32_t kDefaultClusterSize = 8192;
constexpr uint32_t kDefaultDirCapacity = 4096;
constexpr size_t kMaxNameBytes = 255;

enum class AllocPolicy : uint8_t {
    // Every single-cluster allocation walks the whole table from entry 0,
    // the pathology the tested FAT32 libraries exhibit.
    Naive = 0,
    // Scan resumes at the cluster where the previous allocation left off.
    Cursor = 1,
};

struct DirEntry {
    std::string name;
    uint64_t size = 0;
    uint64_t created = 0;
    uint64_t modified = 0;
    uint32_t first_cluster = 0xFFFFFFFF;  // none for empty files
    bool hidden = false;
    bool deleted = false;
};

// Sectors a vault with this geometry occupies (superblock + table + directory
// + data clusters); sizing helper for range provisioning.
uint64_t vault_region_sectors(uint32_t num_clusters, uint32_t cluster_size = kDefaultClusterSize,
                              uint32_t dir_capacity = kDefaultDirCapacity);

// Minimal cluster-chain filesystem over raw sectors. Flat root directory,
// write-through metadata, buffered multi-sector data I/O. The on-media layout
// is a behavioral model, not FAT32-compatible.
class VaultFs {
public:
    static Result<VaultFs> format(BlockDevice& dev, uint32_t num_clusters,
                                  uint32_t cluster_size = kDefaultClusterSize,
                                  uint32_t dir_capacity = kDefaultDirCapacity,
                                  AllocPolicy default_policy = AllocPolicy::Cursor);
    static Result<VaultFs> open(BlockDevice& dev);

    Result<DirEntry> create_write(const std::string& name, std::span<const uint8_t> bytes,
                                  uint64_t timestamp, std::optional<AllocPolicy> policy = std::nullopt);
    Result<Bytes> read_file(const std::string& name) const;
    Result<DirEntry> overwrite(const std::string& name, std::span<const uint8_t> bytes, uint64_t timestamp);
    Result<void> rename(const std::string& old_name, const std::string& new_name);
    Result<void> set_hidden(const std::string& name, bool hidden);
    Result<void> delete_entry(const std::string& name);
    std::vector<DirEntry> list(bool show_hidden = false) const;
    std::optional<DirEntry> find(const std::string& name) const;

    uint64_t probe_counter() const { return probe_counter_; }
    uint32_t num_clusters() const { return num_clusters_; }
    uint32_t cluster_size() const { return cluster_size_; }
    uint32_t alloc_cursor() const { return alloc_cursor_; }
    uint32_t free_clusters() const;

    // Clusters reachable from the directory, for leak/double-use checks.
    Result<std::vector<uint32_t>> chain_of(const std::string& name) const;

    // Fixed tab-separated listing: name, size, created, modified, flags.
    static std::string format_listing(const std::vector<DirEntry>& entries);

private:
    explicit VaultFs(BlockDevice& dev) : dev_(dev) {}

    static constexpr uint32_t kFree = 0xFFFFFFFE;
    static constexpr uint32_t kEndOfChain = 0xFFFFFFFF;
    static constexpr size_t kEntryBytes = 288;

    uint64_t table_sectors() const;
    uint64_t dir_sectors() const;
    uint64_t data_start() const { return 1 + table_sectors() + dir_sectors(); }
    uint32_t sectors_per_cluster() const { return cluster_size_ / kSectorSize; }

    Result<std::vector<uint32_t>> allocate(uint32_t count, AllocPolicy policy);
    void release(const std::vector<uint32_t>& clusters);

    Result<void> write_chain_data(const std::vector<uint32_t>& chain, std::span<const uint8_t> bytes);
    Result<Bytes> read_chain_data(uint32_t first_cluster, uint64_t size) const;
    std::vector<uint32_t> collect_chain(uint32_t first_cluster) const;

    Result<void> flush_all();
    Result<void> parse();

    int find_live(const std::string& name) const;
    int find_slot() const;

    BlockDevice& dev_;
    uint32_t num_clusters_ = 0;
    uint32_t cluster_size_ = 0;
    uint32_t dir_capacity_ = 0;
    uint32_t alloc_cursor_ = 0;
    uint64_t probe_counter_ = 0;
    AllocPolicy default_policy_ = AllocPolicy::Cursor;
    std::vector<uint32_t> table_;
    std::vector<DirEntry> dir_;       // slot-indexed; name empty => never used
    std::vector<uint8_t> slot_used_;  // parallel to dir_
};

}  // namespace inuksuk
