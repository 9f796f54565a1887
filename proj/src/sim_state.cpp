#include "inuksuk/sim_state.hpp"

#include <fstream>

#include "json.hpp"

namespace inuksuk {

using nlohmann::json;

std::string state_image_path(const std::string& state_path) { return state_path + ".img"; }
std::string state_transcript_path(const std::string& state_path) { return state_path + ".log"; }

Result<void> save_state(const SimWorld& world, const std::string& state_path) {
    json j;
    j["version"] = 1;
    j["seed"] = world.cfg.seed;
    j["clock"] = world.clock.now_s;
    j["psid"] = hex_encode(world.psid);
    j["admin_credential"] = hex_encode(world.admin_credential);
    j["config"] = {{"unprotected_sectors", world.cfg.unprotected_sectors},
                   {"fs_clusters", world.cfg.fs_clusters},
                   {"fs_cluster_size", world.cfg.fs_cluster_size},
                   {"fs_dir_capacity", world.cfg.fs_dir_capacity},
                   {"transition_cost_s", world.cfg.transition_cost_s}};
    j["provisioned"] = world.provisioned;
    j["env"] = {{"protected_range_id", world.env.protected_range_id},
                {"nvram_index", world.env.nvram_index}};

    json ranges = json::array();
    for (const auto& r : world.sed.ranges()) {
        ranges.push_back({{"range_id", r.range_id},
                          {"start_lba", r.start_lba},
                          {"length", r.length},
                          {"write_lock_enabled", r.write_lock_enabled},
                          {"read_lock_enabled", r.read_lock_enabled},
                          {"write_locked", r.write_locked},
                          {"read_locked", r.read_locked},
                          {"credential", hex_encode(r.credential)}});
    }
    j["sed"] = {{"next_range_id", world.sed.next_range_id()}, {"ranges", ranges}};

    json nvram = json::array();
    for (const auto& [index, slot] : world.tpm.nvram()) {
        json policy = json::array();
        for (const auto& b : slot.read_policy)
            policy.push_back({{"index", b.index}, {"expected", hex_encode(b.expected)}});
        nvram.push_back({{"index", index},
                         {"data", hex_encode(slot.data)},
                         {"defined", slot.defined},
                         {"policy", policy}});
    }
    j["tpm"] = {{"root_secret", hex_encode(world.tpm.root_secret())}, {"nvram", nvram}};

    json files = json::object();
    for (const auto& [name, f] : world.host.files())
        files[name] = {{"content", hex_encode(f.content)},
                       {"modified", f.modified},
                       {"mods_since_commit", f.mods_since_commit}};
    j["host"] = {{"files", files},
                 {"plaintext_policy",
                  world.host.plaintext_policy ? json(*world.host.plaintext_policy) : json(nullptr)},
                 {"schedule",
                  {{"interval", world.host.schedule().interval},
                   {"next_fire", world.host.schedule().next_fire},
                   {"manual_trigger_pending", world.host.schedule().manual_trigger_pending}}},
                 {"driver_killed", world.host.driver_killed()}};

    std::ofstream img(state_image_path(state_path), std::ios::binary | std::ios::trunc);
    auto sectors = world.sed.raw_sectors();
    img.write(reinterpret_cast<const char*>(sectors.data()), std::streamsize(sectors.size()));
    if (!img) return error(Err::BadArgument, "cannot write " + state_image_path(state_path));

    std::ofstream out(state_path, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) return error(Err::BadArgument, "cannot write " + state_path);
    return {};
}

Result<std::unique_ptr<SimWorld>> load_state(const std::string& state_path) {
    std::ifstream in(state_path);
    if (!in) return error(Err::NotFound, "no state file: " + state_path);
    json j;
    try {
        j = json::parse(in);
    } catch (const std::exception& e) {
        return error(Err::BadArgument, std::string("state parse: ") + e.what());
    }

    try {
        WorldConfig cfg;
        cfg.seed = j.at("seed").get<uint64_t>();
        const auto& c = j.at("config");
        cfg.unprotected_sectors = c.at("unprotected_sectors").get<uint64_t>();
        cfg.fs_clusters = c.at("fs_clusters").get<uint32_t>();
        cfg.fs_cluster_size = c.at("fs_cluster_size").get<uint32_t>();
        cfg.fs_dir_capacity = c.at("fs_dir_capacity").get<uint32_t>();
        cfg.transition_cost_s = c.at("transition_cost_s").get<uint64_t>();

        auto world = std::make_unique<SimWorld>(cfg);
        // Key material is derived from the seed; a mismatch means the file
        // was edited by hand.
        if (hex_encode(world->psid) != j.at("psid").get<std::string>() ||
            hex_encode(world->admin_credential) != j.at("admin_credential").get<std::string>() ||
            hex_encode(world->tpm.root_secret()) != j.at("tpm").at("root_secret").get<std::string>())
            return error(Err::BadArgument, "state file inconsistent with seed");

        world->clock.now_s = j.at("clock").get<uint64_t>();
        world->provisioned = j.at("provisioned").get<bool>();
        world->env.protected_range_id = j.at("env").at("protected_range_id").get<uint32_t>();

        std::ifstream img(state_image_path(state_path), std::ios::binary);
        if (!img) return error(Err::NotFound, "no image file: " + state_image_path(state_path));
        Bytes sectors(world->sed.raw_sectors().size());
        img.read(reinterpret_cast<char*>(sectors.data()), std::streamsize(sectors.size()));
        if (img.gcount() != std::streamsize(sectors.size()))
            return error(Err::BadArgument, "image truncated");
        world->sed.load_raw_sectors(std::move(sectors));

        std::vector<LockingRange> ranges;
        for (const auto& jr : j.at("sed").at("ranges")) {
            LockingRange r;
            r.range_id = jr.at("range_id").get<uint32_t>();
            r.start_lba = jr.at("start_lba").get<uint64_t>();
            r.length = jr.at("length").get<uint64_t>();
            r.write_lock_enabled = jr.at("write_lock_enabled").get<bool>();
            r.read_lock_enabled = jr.at("read_lock_enabled").get<bool>();
            r.write_locked = jr.at("write_locked").get<bool>();
            r.read_locked = jr.at("read_locked").get<bool>();
            r.credential = hex_decode(jr.at("credential").get<std::string>());
            ranges.push_back(std::move(r));
        }
        world->sed.restore_ranges(std::move(ranges), j.at("sed").at("next_range_id").get<uint32_t>());

        std::map<uint32_t, NvramSlot> slots;
        for (const auto& js : j.at("tpm").at("nvram")) {
            NvramSlot slot;
            slot.index = js.at("index").get<uint32_t>();
            slot.data = hex_decode(js.at("data").get<std::string>());
            slot.defined = js.at("defined").get<bool>();
            for (const auto& jb : js.at("policy")) {
                PcrBinding b;
                b.index = jb.at("index").get<uint32_t>();
                Bytes expected = hex_decode(jb.at("expected").get<std::string>());
                std::copy_n(expected.begin(), 32, b.expected.begin());
                slot.read_policy.push_back(b);
            }
            slots[slot.index] = std::move(slot);
        }
        world->tpm.restore_nvram(std::move(slots));

        const auto& h = j.at("host");
        for (const auto& [name, jf] : h.at("files").items()) {
            OriginalFile f;
            f.content = hex_decode(jf.at("content").get<std::string>());
            f.modified = jf.at("modified").get<uint64_t>();
            f.mods_since_commit = jf.at("mods_since_commit").get<uint32_t>();
            world->host.files()[name] = std::move(f);
        }
        if (!h.at("plaintext_policy").is_null())
            world->host.plaintext_policy = h.at("plaintext_policy").get<std::string>();
        world->host.schedule().interval = h.at("schedule").at("interval").get<uint64_t>();
        world->host.schedule().next_fire = h.at("schedule").at("next_fire").get<uint64_t>();
        world->host.schedule().manual_trigger_pending =
            h.at("schedule").at("manual_trigger_pending").get<bool>();
        if (h.at("driver_killed").get<bool>()) world->host.kill_driver();

        return world;
    } catch (const std::exception& e) {
        return error(Err::BadArgument, std::string("state fields: ") + e.what());
    }
}

}  // namespace inuksuk
