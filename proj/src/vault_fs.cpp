#include "inuksuk/vault_fs.hpp"

#include <algorithm>
#include <cstring>

namespace inuksuk {

namespace {
constexpr char kMagic[4] = {'I', 'V', 'F', 'S'};
constexpr uint8_t kFlagUsed = 0x01;
constexpr uint8_t kFlagDeleted = 0x02;
constexpr uint8_t kFlagHidden = 0x04;

bool valid_name(const std::string& name) {
    if (name.empty() || name.size() > kMaxNameBytes) return false;
    return name.find('/') == std::string::npos && name.find('\\') == std::string::npos;
}
}  // namespace

uint64_t vault_region_sectors(uint32_t num_clusters, uint32_t cluster_size, uint32_t dir_capacity) {
    uint64_t table = (uint64_t(num_clusters) * 4 + kSectorSize - 1) / kSectorSize;
    uint64_t dir = (uint64_t(dir_capacity) * 288 + kSectorSize - 1) / kSectorSize;
    return 1 + table + dir + uint64_t(num_clusters) * (cluster_size / kSectorSize);
}

uint64_t VaultFs::table_sectors() const {
    return (uint64_t(num_clusters_) * 4 + kSectorSize - 1) / kSectorSize;
}

uint64_t VaultFs::dir_sectors() const {
    return (uint64_t(dir_capacity_) * kEntryBytes + kSectorSize - 1) / kSectorSize;
}

Result<VaultFs> VaultFs::format(BlockDevice& dev, uint32_t num_clusters, uint32_t cluster_size,
                                uint32_t dir_capacity, AllocPolicy default_policy) {
    if (num_clusters < 1 || cluster_size < kSectorSize || cluster_size % kSectorSize != 0 || dir_capacity < 1)
        return error(Err::TooSmall, "bad geometry");

    VaultFs fs(dev);
    fs.num_clusters_ = num_clusters;
    fs.cluster_size_ = cluster_size;
    fs.dir_capacity_ = dir_capacity;
    fs.default_policy_ = default_policy;
    fs.alloc_cursor_ = 0;
    fs.probe_counter_ = 0;

    uint64_t required = fs.data_start() + uint64_t(num_clusters) * fs.sectors_per_cluster();
    if (dev.sector_count() < required) return error(Err::TooSmall, "backing smaller than geometry");

    // Zero the whole region so formatting is deterministic regardless of
    // previous contents.
    {
        const uint64_t chunk_sectors = 16384;  // 8 MiB
        Bytes zeros(chunk_sectors * kSectorSize, 0);
        uint64_t lba = 0;
        while (lba < required) {
            uint64_t n = std::min(chunk_sectors, required - lba);
            auto r = dev.write(lba, std::span(zeros.data(), n * kSectorSize));
            if (!r.ok()) return r.err();
            lba += n;
        }
    }

    fs.table_.assign(num_clusters, kFree);
    fs.dir_.assign(dir_capacity, DirEntry{});
    fs.slot_used_.assign(dir_capacity, 0);
    auto r = fs.flush_all();
    if (!r.ok()) return r.err();
    return fs;
}

Result<VaultFs> VaultFs::open(BlockDevice& dev) {
    VaultFs fs(dev);
    auto r = fs.parse();
    if (!r.ok()) return r.err();
    return fs;
}

Result<void> VaultFs::parse() {
    auto super = dev_.read(0, 1);
    if (!super.ok()) return super.err();
    const Bytes& s = super.value();
    if (std::memcmp(s.data(), kMagic, 4) != 0) return error(Err::NotFound, "no filesystem");
    num_clusters_ = get_u32le(std::span(s).subspan(8, 4));
    cluster_size_ = get_u32le(std::span(s).subspan(12, 4));
    alloc_cursor_ = get_u32le(std::span(s).subspan(16, 4));
    probe_counter_ = get_u64le(std::span(s).subspan(20, 8));
    dir_capacity_ = get_u32le(std::span(s).subspan(28, 4));
    default_policy_ = s[32] == 0 ? AllocPolicy::Naive : AllocPolicy::Cursor;
    if (num_clusters_ < 1 || cluster_size_ < kSectorSize || cluster_size_ % kSectorSize != 0)
        return error(Err::NotFound, "corrupt superblock");

    auto traw = dev_.read(1, table_sectors());
    if (!traw.ok()) return traw.err();
    table_.resize(num_clusters_);
    for (uint32_t i = 0; i < num_clusters_; ++i)
        table_[i] = get_u32le(std::span(traw.value()).subspan(size_t(i) * 4, 4));

    auto draw = dev_.read(1 + table_sectors(), dir_sectors());
    if (!draw.ok()) return draw.err();
    dir_.assign(dir_capacity_, DirEntry{});
    slot_used_.assign(dir_capacity_, 0);
    for (uint32_t i = 0; i < dir_capacity_; ++i) {
        std::span<const uint8_t> e(draw.value().data() + size_t(i) * kEntryBytes, kEntryBytes);
        uint8_t flags = e[0];
        if (!(flags & kFlagUsed)) continue;
        slot_used_[i] = 1;
        DirEntry& d = dir_[i];
        d.deleted = flags & kFlagDeleted;
        d.hidden = flags & kFlagHidden;
        size_t name_len = e[1];
        d.name.assign(reinterpret_cast<const char*>(e.data() + 2), name_len);
        d.size = get_u64le(e.subspan(257, 8));
        d.created = get_u64le(e.subspan(265, 8));
        d.modified = get_u64le(e.subspan(273, 8));
        d.first_cluster = get_u32le(e.subspan(281, 4));
    }
    return {};
}

Result<void> VaultFs::flush_all() {
    Bytes super(kSectorSize, 0);
    std::memcpy(super.data(), kMagic, 4);
    put_u32le(std::span(super).subspan(4, 4), 1);
    put_u32le(std::span(super).subspan(8, 4), num_clusters_);
    put_u32le(std::span(super).subspan(12, 4), cluster_size_);
    put_u32le(std::span(super).subspan(16, 4), alloc_cursor_);
    put_u64le(std::span(super).subspan(20, 8), probe_counter_);
    put_u32le(std::span(super).subspan(28, 4), dir_capacity_);
    super[32] = default_policy_ == AllocPolicy::Naive ? 0 : 1;
    auto r = dev_.write(0, super);
    if (!r.ok()) return r;

    Bytes traw(table_sectors() * kSectorSize, 0);
    for (uint32_t i = 0; i < num_clusters_; ++i)
        put_u32le(std::span(traw).subspan(size_t(i) * 4, 4), table_[i]);
    r = dev_.write(1, traw);
    if (!r.ok()) return r;

    Bytes draw(dir_sectors() * kSectorSize, 0);
    for (uint32_t i = 0; i < dir_capacity_; ++i) {
        std::span<uint8_t> e(draw.data() + size_t(i) * kEntryBytes, kEntryBytes);
        if (!slot_used_[i]) continue;
        const DirEntry& d = dir_[i];
        e[0] = uint8_t(kFlagUsed | (d.deleted ? kFlagDeleted : 0) | (d.hidden ? kFlagHidden : 0));
        e[1] = uint8_t(d.name.size());
        std::memcpy(e.data() + 2, d.name.data(), d.name.size());
        put_u64le(e.subspan(257, 8), d.size);
        put_u64le(e.subspan(265, 8), d.created);
        put_u64le(e.subspan(273, 8), d.modified);
        put_u32le(e.subspan(281, 4), d.first_cluster);
    }
    return dev_.write(1 + table_sectors(), draw);
}

int VaultFs::find_live(const std::string& name) const {
    for (size_t i = 0; i < dir_.size(); ++i)
        if (slot_used_[i] && !dir_[i].deleted && dir_[i].name == name) return int(i);
    return -1;
}

int VaultFs::find_slot() const {
    for (size_t i = 0; i < dir_.size(); ++i)
        if (!slot_used_[i] || dir_[i].deleted) return int(i);
    return -1;
}

Result<std::vector<uint32_t>> VaultFs::allocate(uint32_t count, AllocPolicy policy) {
    std::vector<uint32_t> chain;
    chain.reserve(count);
    uint32_t saved_cursor = alloc_cursor_;

    for (uint32_t k = 0; k < count; ++k) {
        int64_t chosen = -1;
        if (policy == AllocPolicy::Naive) {
            // Full-table walk from entry 0 for every cluster appended.
            uint64_t probes = 0;
            for (uint32_t j = 0; j < num_clusters_; ++j) {
                ++probes;
                if (chosen < 0 && table_[j] == kFree) chosen = j;
            }
            probe_counter_ += probes;
        } else {
            uint32_t pos = alloc_cursor_;
            for (uint32_t step = 0; step < num_clusters_; ++step) {
                ++probe_counter_;
                if (table_[pos] == kFree) {
                    chosen = pos;
                    break;
                }
                pos = pos + 1 == num_clusters_ ? 0 : pos + 1;
            }
            if (chosen >= 0) alloc_cursor_ = uint32_t(chosen) + 1 == num_clusters_ ? 0 : uint32_t(chosen) + 1;
        }
        if (chosen < 0) {
            release(chain);
            alloc_cursor_ = saved_cursor;
            return error(Err::NoSpace, "no free cluster");
        }
        table_[uint32_t(chosen)] = kEndOfChain;
        if (!chain.empty()) table_[chain.back()] = uint32_t(chosen);
        chain.push_back(uint32_t(chosen));
    }
    return chain;
}

void VaultFs::release(const std::vector<uint32_t>& clusters) {
    for (uint32_t c : clusters) table_[c] = kFree;
}

std::vector<uint32_t> VaultFs::collect_chain(uint32_t first_cluster) const {
    std::vector<uint32_t> chain;
    uint32_t c = first_cluster;
    while (c != kEndOfChain && c != kFree && c < num_clusters_ && chain.size() <= num_clusters_) {
        chain.push_back(c);
        c = table_[c];
        if (c == kEndOfChain) break;
    }
    return chain;
}

Result<void> VaultFs::write_chain_data(const std::vector<uint32_t>& chain, std::span<const uint8_t> bytes) {
    const uint32_t spc = sectors_per_cluster();
    size_t off = 0;
    size_t i = 0;
    while (i < chain.size()) {
        // Merge contiguous clusters into one request: as many sectors as possible.
        size_t run = 1;
        while (i + run < chain.size() && chain[i + run] == chain[i] + run) ++run;
        Bytes buf(run * cluster_size_, 0);
        size_t n = std::min(buf.size(), bytes.size() - off);
        std::memcpy(buf.data(), bytes.data() + off, n);
        off += n;
        auto r = dev_.write(data_start() + uint64_t(chain[i]) * spc, buf);
        if (!r.ok()) return r;
        i += run;
    }
    return {};
}

Result<Bytes> VaultFs::read_chain_data(uint32_t first_cluster, uint64_t size) const {
    Bytes out;
    out.reserve(size);
    if (size == 0 || first_cluster == kEndOfChain || first_cluster == kFree) {
        out.resize(size_t(size), 0);
        return out;
    }
    const uint32_t spc = sectors_per_cluster();
    std::vector<uint32_t> chain = collect_chain(first_cluster);
    size_t i = 0;
    while (i < chain.size()) {
        size_t run = 1;
        while (i + run < chain.size() && chain[i + run] == chain[i] + run) ++run;
        auto r = dev_.read(data_start() + uint64_t(chain[i]) * spc, uint64_t(run) * spc);
        if (!r.ok()) return r.err();
        out.insert(out.end(), r.value().begin(), r.value().end());
        i += run;
    }
    out.resize(size_t(size));
    return out;
}

Result<DirEntry> VaultFs::create_write(const std::string& name, std::span<const uint8_t> bytes,
                                       uint64_t timestamp, std::optional<AllocPolicy> policy) {
    if (!valid_name(name)) return error(Err::BadArgument, "bad file name");
    if (find_live(name) >= 0) return error(Err::Exists, name);
    int slot = find_slot();
    if (slot < 0) return error(Err::NoSpace, "directory full");

    uint32_t clusters = uint32_t((bytes.size() + cluster_size_ - 1) / cluster_size_);
    auto chain = allocate(clusters, policy.value_or(default_policy_));
    if (!chain.ok()) return chain.err();
    if (!bytes.empty()) {
        auto w = write_chain_data(chain.value(), bytes);
        if (!w.ok()) {
            release(chain.value());
            return w.err();
        }
    }

    DirEntry d;
    d.name = name;
    d.size = bytes.size();
    d.created = timestamp;
    d.modified = timestamp;
    d.first_cluster = chain.value().empty() ? kEndOfChain : chain.value().front();
    dir_[slot] = d;
    slot_used_[slot] = 1;
    auto f = flush_all();
    if (!f.ok()) return f.err();
    return d;
}

Result<Bytes> VaultFs::read_file(const std::string& name) const {
    int idx = find_live(name);
    if (idx < 0) return error(Err::NotFound, name);
    return read_chain_data(dir_[idx].first_cluster, dir_[idx].size);
}

Result<DirEntry> VaultFs::overwrite(const std::string& name, std::span<const uint8_t> bytes,
                                    uint64_t timestamp) {
    int idx = find_live(name);
    if (idx < 0) return error(Err::NotFound, name);

    // New content goes to a fresh chain first; the original survives NoSpace.
    uint32_t clusters = uint32_t((bytes.size() + cluster_size_ - 1) / cluster_size_);
    auto chain = allocate(clusters, default_policy_);
    if (!chain.ok()) return chain.err();
    if (!bytes.empty()) {
        auto w = write_chain_data(chain.value(), bytes);
        if (!w.ok()) {
            release(chain.value());
            return w.err();
        }
    }
    if (dir_[idx].first_cluster != kEndOfChain) release(collect_chain(dir_[idx].first_cluster));
    dir_[idx].size = bytes.size();
    dir_[idx].modified = timestamp;
    dir_[idx].first_cluster = chain.value().empty() ? kEndOfChain : chain.value().front();
    auto f = flush_all();
    if (!f.ok()) return f.err();
    return dir_[idx];
}

Result<void> VaultFs::rename(const std::string& old_name, const std::string& new_name) {
    if (!valid_name(new_name)) return error(Err::BadArgument, "bad file name");
    int idx = find_live(old_name);
    if (idx < 0) return error(Err::NotFound, old_name);
    if (find_live(new_name) >= 0) return error(Err::Exists, new_name);
    dir_[idx].name = new_name;
    return flush_all();
}

Result<void> VaultFs::set_hidden(const std::string& name, bool hidden) {
    int idx = find_live(name);
    if (idx < 0) return error(Err::NotFound, name);
    dir_[idx].hidden = hidden;
    return flush_all();
}

Result<void> VaultFs::delete_entry(const std::string& name) {
    int idx = find_live(name);
    if (idx < 0) return error(Err::NotFound, name);
    // Flag-only deletion: the chain is freed, data bytes stay on media until
    // the clusters are reused.
    if (dir_[idx].first_cluster != kEndOfChain) release(collect_chain(dir_[idx].first_cluster));
    dir_[idx].deleted = true;
    dir_[idx].first_cluster = kEndOfChain;
    return flush_all();
}

std::vector<DirEntry> VaultFs::list(bool show_hidden) const {
    std::vector<DirEntry> out;
    for (size_t i = 0; i < dir_.size(); ++i) {
        if (!slot_used_[i] || dir_[i].deleted) continue;
        if (dir_[i].hidden && !show_hidden) continue;
        out.push_back(dir_[i]);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

std::optional<DirEntry> VaultFs::find(const std::string& name) const {
    int idx = find_live(name);
    if (idx < 0) return std::nullopt;
    return dir_[idx];
}

uint32_t VaultFs::free_clusters() const {
    return uint32_t(std::count(table_.begin(), table_.end(), kFree));
}

Result<std::vector<uint32_t>> VaultFs::chain_of(const std::string& name) const {
    int idx = find_live(name);
    if (idx < 0) return error(Err::NotFound, name);
    if (dir_[idx].first_cluster == kEndOfChain) return std::vector<uint32_t>{};
    return collect_chain(dir_[idx].first_cluster);
}

std::string VaultFs::format_listing(const std::vector<DirEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += e.name;
        out += '\t';
        out += std::to_string(e.size);
        out += '\t';
        out += std::to_string(e.created);
        out += '\t';
        out += std::to_string(e.modified);
        out += '\t';
        out += e.hidden ? 'h' : '-';
        out += '\n';
    }
    return out;
}

}  // namespace inuksuk
