#include "inuksuk/adversary.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "inuksuk/crypto.hpp"

namespace inuksuk {

using nlohmann::json;

const char* const kScenarioIds[8] = {
    "direct_write",   "credential_theft",   "binary_tamper", "forged_ui",
    "driver_kill",    "version_exhaustion", "clock_attack",  "persistent_ransomware",
};

Result<AttackScenario> AttackScenario::from_json(const json& j) {
    AttackScenario s;
    try {
        s.id = j.at("id").get<std::string>();
        s.parameters = j.value("parameters", json::object());
        s.expected_outcome = j.value("expected_outcome", json::object());
    } catch (const std::exception& e) {
        return error(Err::BadArgument, std::string("scenario parse: ") + e.what());
    }
    if (std::find_if(std::begin(kScenarioIds), std::end(kScenarioIds),
                     [&](const char* id) { return s.id == id; }) == std::end(kScenarioIds))
        return error(Err::BadArgument, "unknown scenario id: " + s.id);
    return s;
}

Result<AttackScenario> AttackScenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return error(Err::BadArgument, "cannot open scenario file: " + path);
    try {
        return from_json(json::parse(in));
    } catch (const std::exception& e) {
        return error(Err::BadArgument, std::string("scenario json: ") + e.what());
    }
}

json AttackOutcome::to_json() const {
    json j = fields;
    j["scenario_id"] = scenario_id;
    j["protected_digest_before"] = protected_digest_before;
    j["protected_digest_after"] = protected_digest_after;
    j["data_loss"] = data_loss;
    j["detection_signals"] = detection_signals;
    return j;
}

namespace {

std::string protected_digest(const SimWorld& world) {
    auto raw = world.sed.read_sectors(world.env.protected_base_lba, world.env.protected_length);
    return hex_encode(crypto::sha256(raw.value()));
}

// Identity of a committed version: base name plus version timestamp (plus the
// collision suffix when present), stable across the live->hidden rename.
std::string triple_key(const std::string& entry_name, uint64_t modified) {
    if (auto parsed = updater::parse_version_name(entry_name))
        return entry_name.size() > 14 && entry_name[entry_name.size() - 4] == '.'
                   ? parsed->first + "@" + std::to_string(parsed->second) + entry_name.substr(entry_name.size() - 4)
                   : parsed->first + "@" + std::to_string(parsed->second);
    return entry_name + "@" + std::to_string(modified);
}

}  // namespace

Result<std::vector<LedgerTriple>> build_ledger(const SimWorld& world) {
    auto view = world.recover();
    if (!view.ok()) return view.err();
    std::vector<LedgerTriple> out;
    for (const auto& e : view.value().list(true)) {
        auto content = view.value().read_file(e.name);
        if (!content.ok()) return content.err();
        LedgerTriple t;
        if (auto parsed = updater::parse_version_name(e.name)) {
            t.base_name = parsed->first;
            t.version_timestamp = parsed->second;
        } else {
            t.base_name = e.name;
            t.version_timestamp = e.modified;
        }
        t.digest_hex = hex_encode(crypto::sha256(content.value()));
        out.push_back(std::move(t));
    }
    return out;
}

namespace {

std::map<std::string, std::set<std::string>> ledger_index(const SimWorld& world) {
    std::map<std::string, std::set<std::string>> idx;
    auto view = world.recover();
    if (!view.ok()) return idx;
    for (const auto& e : view.value().list(true)) {
        auto content = view.value().read_file(e.name);
        if (!content.ok()) continue;
        idx[triple_key(e.name, e.modified)].insert(hex_encode(crypto::sha256(content.value())));
    }
    return idx;
}

struct LedgerSnapshot {
    std::vector<std::pair<std::string, std::string>> triples;  // key -> digest
};

LedgerSnapshot snapshot_ledger(const SimWorld& world) {
    LedgerSnapshot snap;
    for (auto& [key, digests] : ledger_index(world))
        for (auto& d : digests) snap.triples.emplace_back(key, d);
    return snap;
}

// Fraction of pre-attack triples still readable with identical content,
// ignoring entries removed by a policy-legitimate deletion.
double recoverable_fraction(const SimWorld& world, const LedgerSnapshot& pre,
                            const std::set<std::string>& legit_deleted, std::vector<std::string>* lost) {
    auto now = ledger_index(world);
    size_t total = 0, found = 0;
    for (const auto& [key, digest] : pre.triples) {
        std::string base = key.substr(0, key.find('@'));
        bool deleted_ok = false;
        for (const auto& name : legit_deleted) {
            if (auto parsed = updater::parse_version_name(name);
                parsed && triple_key(name, parsed->second) == key)
                deleted_ok = true;
        }
        if (deleted_ok) continue;
        ++total;
        auto it = now.find(key);
        if (it != now.end() && it->second.count(digest)) {
            ++found;
        } else if (lost) {
            lost->push_back(key);
        }
    }
    return total == 0 ? 1.0 : double(found) / double(total);
}

UpdatePolicy policy_from_params(const json& parameters) {
    UpdatePolicy p;
    p.avatar = "glacier-owl-7719";
    if (!parameters.contains("policy")) return p;
    const json& jp = parameters["policy"];
    p.commit_interval = jp.value("commit_interval", p.commit_interval);
    p.max_file_size = jp.value("max_file_size", p.max_file_size);
    p.version_limit = jp.value("version_limit", p.version_limit);
    p.age_threshold = jp.value("age_threshold", p.age_threshold);
    p.anomaly_version_threshold = jp.value("anomaly_version_threshold", p.anomaly_version_threshold);
    p.avatar = jp.value("avatar", p.avatar);
    return p;
}

struct Arena {
    std::unique_ptr<SimWorld> world;
    UpdatePolicy policy;
    std::vector<std::string> file_names;
    DetRng attack_rng{0xAD};
};

Result<Arena> setup_arena(const json& parameters, uint64_t seed) {
    WorldConfig wc;
    wc.seed = parameters.value("seed", seed);
    wc.fs_clusters = parameters.value("fs_clusters", 2048u);
    wc.fs_dir_capacity = parameters.value("fs_dir_capacity", 1024u);

    Arena arena;
    arena.world = std::make_unique<SimWorld>(wc);
    arena.attack_rng = DetRng(wc.seed ^ 0xADBEEF);
    SimWorld& w = *arena.world;
    w.clock.advance(parameters.value("start_time", uint64_t(1000)));

    uint32_t nfiles = parameters.value("files", 5u);
    uint64_t fsize = parameters.value("file_size", uint64_t(4096));
    for (uint32_t i = 0; i < nfiles; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "file_%02u.dat", i);
        auto r = w.host.app_write(name, w.rng.bytes(fsize), w.clock.now_s);
        if (!r.ok()) return r.err();
        arena.file_names.push_back(name);
        w.clock.advance(1);
    }

    arena.policy = policy_from_params(parameters);
    auto provisioned = w.provision(arena.policy);
    if (!provisioned.ok()) return provisioned.err();
    if (!provisioned.value().session.program_result.ok()) return provisioned.value().session.program_result.err();
    return arena;
}

// Everything a rootkit can read outside the TEE: original files, the
// plaintext policy, the transcript. Session UI output is excluded by
// construction.
std::string host_visible_text(const SimWorld& world) {
    std::string blob;
    for (const auto& [name, f] : world.host.files()) {
        blob += name;
        blob += '\n';
        blob += to_string(f.content);
        blob += '\n';
    }
    if (world.host.plaintext_policy) blob += *world.host.plaintext_policy;
    for (const auto& e : world.trace.events()) {
        blob += e.kind;
        blob += '\t';
        blob += e.detail;
        blob += '\n';
    }
    return blob;
}

bool text_contains_secret(const std::string& haystack, const Bytes& secret) {
    std::string raw = to_string(secret);
    std::string hex = hex_encode(secret);
    return haystack.find(raw) != std::string::npos || haystack.find(hex) != std::string::npos;
}

Result<SessionOutcome> committed_ok(Result<SessionOutcome> r) {
    if (!r.ok()) return r;
    if (!r.value().session.program_result.ok()) return r.value().session.program_result.err();
    return r;
}

// ---- scenario bodies -------------------------------------------------------

Result<void> attack_direct_write(Arena& arena, const json& parameters, AttackOutcome& out) {
    SimWorld& w = *arena.world;
    const uint64_t base = w.env.protected_base_lba;
    const uint64_t len = w.env.protected_length;

    uint32_t attempts = 0, rejected = 0;
    Bytes garbage = arena.attack_rng.bytes(kSectorSize);
    for (uint64_t lba : {base, base + len / 2, base + len - 1}) {
        ++attempts;
        if (w.sed.write_sectors(lba, garbage).code() == Err::WriteLocked) ++rejected;
    }
    // Spanning write: one unprotected sector, one protected; all-or-nothing.
    Bytes two = arena.attack_rng.bytes(2 * kSectorSize);
    ++attempts;
    if (w.sed.write_sectors(base - 1, two).code() == Err::WriteLocked) ++rejected;

    uint32_t unlocks_rejected = 0;
    Bytes guesses[] = {Bytes(32, 0), w.admin_credential, arena.attack_rng.bytes(32)};
    for (const auto& guess : guesses)
        if (w.sed.unlock_write(w.env.protected_range_id, guess).code() == Err::BadCredential)
            ++unlocks_rejected;
    ++attempts;
    if (w.sed.write_sectors(base, garbage).code() == Err::WriteLocked) ++rejected;

    uint32_t repeats = parameters.value("extra_writes", 100u);
    for (uint32_t i = 0; i < repeats; ++i) {
        ++attempts;
        uint64_t lba = base + arena.attack_rng.uniform(0, len - 1);
        if (w.sed.write_sectors(lba, garbage).code() == Err::WriteLocked) ++rejected;
    }

    out.fields["writes_attempted"] = attempts;
    out.fields["writes_rejected"] = rejected;
    out.fields["unlock_attempts_rejected"] = unlocks_rejected;
    return {};
}

Result<void> attack_credential_theft(Arena& arena, const json&, AttackOutcome& out) {
    SimWorld& w = *arena.world;
    auto nv = w.tpm.nvram_read(kSealedStateNvramIndex);
    out.fields["nvram_read_denied"] = !nv.ok();
    out.fields["nvram_read_error"] = nv.ok() ? "none" : err_name(nv.code());

    const LockingRange* range = w.sed.find_range(w.env.protected_range_id);
    bool leaked = text_contains_secret(host_visible_text(w), range->credential);
    out.fields["credential_in_host_artifacts"] = leaked;
    if (!leaked) out.detection_signals.push_back("credential_never_observed");

    // Unlock with every byte string the host can actually see.
    bool any_unlock = false;
    if (w.host.plaintext_policy) {
        Bytes guess = to_bytes(w.host.plaintext_policy->substr(0, 32));
        guess.resize(32, 0);
        any_unlock |= w.sed.unlock_write(w.env.protected_range_id, guess).ok();
    }
    any_unlock |= w.sed.unlock_write(w.env.protected_range_id, Bytes(32, 0)).ok();
    out.fields["unlock_with_observed_bytes"] = any_unlock;
    return {};
}

Result<void> attack_binary_tamper(Arena& arena, const json& parameters, AttackOutcome& out) {
    SimWorld& w = *arena.world;
    size_t log_mark = w.sed.command_log().size();

    Bytes tampered = SimWorld::genuine_updater_bytes();
    size_t offset = parameters.value("tamper_offset", uint64_t(7)) % tampered.size();
    tampered[offset] ^= 0xFF;

    // Give the tampered run something to commit so a success would be visible.
    (void)w.host.app_write(arena.file_names.front(), arena.attack_rng.bytes(512), w.clock.now_s + 10);
    w.clock.advance(20);

    auto run = w.run_commit_with_image(tampered);
    if (!run.ok()) return run.err();
    bool unseal_failed = run.value().session.program_result.code() == Err::UnsealFailed;
    out.fields["unseal_failed"] = unseal_failed;
    if (run.value().ui_output.empty()) out.detection_signals.push_back("avatar_absent");

    bool unlock_after = false;
    for (size_t i = log_mark; i < w.sed.command_log().size(); ++i) {
        const auto& cmd = w.sed.command_log()[i];
        if (cmd.verb == "unlock_write" && cmd.accepted &&
            cmd.range_id == int64_t(w.env.protected_range_id))
            unlock_after = true;
    }
    out.fields["unlock_after_tamper"] = unlock_after;
    return {};
}

Result<void> attack_forged_ui(Arena& arena, const json&, AttackOutcome& out) {
    SimWorld& w = *arena.world;

    // The rootkit paints the most convincing updater screen it can from
    // host-visible bytes. The avatar is not among them.
    std::string forged = "INUKSUK TRUSTED UPDATER\n" + host_visible_text(w) + "\ncommit complete.\n";
    Bytes avatar = to_bytes(arena.policy.avatar);
    bool avatar_in_forged = text_contains_secret(forged, avatar);
    out.fields["avatar_in_forged_ui"] = avatar_in_forged;
    out.fields["avatar_in_host_artifacts"] = text_contains_secret(host_visible_text(w), avatar);
    if (!avatar_in_forged) out.detection_signals.push_back("avatar_absent");

    // The genuine session, by contrast, banners the avatar first.
    auto run = committed_ok(w.run_commit());
    if (!run.ok()) return run.err();
    out.fields["genuine_banner_correct"] =
        !run.value().ui_output.empty() && run.value().ui_output.front() == arena.policy.avatar;
    return {};
}

Result<void> attack_driver_kill(Arena& arena, const json& parameters, AttackOutcome& out) {
    SimWorld& w = *arena.world;

    // One legitimate cycle, then the rootkit terminates the OS driver.
    (void)w.host.app_write(arena.file_names.front(), arena.attack_rng.bytes(1024), w.clock.now_s + 5);
    w.clock.advance(arena.policy.commit_interval);
    auto legit = w.pump();
    if (legit && !committed_ok(std::move(*legit)).ok()) return error(Err::ProgramFault, "legit commit failed");

    LedgerSnapshot pre_kill = snapshot_ledger(w);
    w.host.kill_driver();
    uint64_t kill_time = w.clock.now_s;

    uint32_t cycles = parameters.value("cycles_after_kill", 3u);
    uint32_t commits_after = 0;
    std::vector<std::string> changed_after;
    for (uint32_t i = 0; i < cycles; ++i) {
        w.clock.advance(arena.policy.commit_interval);
        std::string victim = arena.file_names[i % arena.file_names.size()];
        (void)w.host.app_write(victim, arena.attack_rng.bytes(2048), w.clock.now_s);
        if (std::find(changed_after.begin(), changed_after.end(), victim) == changed_after.end())
            changed_after.push_back(victim);
        if (w.pump()) ++commits_after;
    }

    out.fields["commits_after_kill"] = commits_after;
    std::vector<std::string> lost;
    double fraction = recoverable_fraction(w, pre_kill, {}, &lost);
    out.fields["pre_kill_versions_intact"] = fraction == 1.0;

    // Updates after the kill exist only on the original side.
    auto view = w.recover();
    if (!view.ok()) return view.err();
    for (const auto& name : changed_after) {
        auto live = view.value().read_file(name);
        Digest host_digest = crypto::sha256(w.host.files().at(name).content);
        if (!live.ok() || crypto::sha256(live.value()) != host_digest)
            out.data_loss.push_back(name + "@" + std::to_string(kill_time) + "+");
    }
    out.fields["post_kill_updates_unprotected"] = uint64_t(out.data_loss.size());
    (void)kill_time;
    return {};
}

Result<void> attack_version_exhaustion(Arena& arena, const json& parameters, AttackOutcome& out) {
    SimWorld& w = *arena.world;
    const std::string target = arena.file_names.front();

    // Genuine history first: two ordinary edit+commit cycles.
    for (int i = 0; i < 2; ++i) {
        (void)w.host.app_write(target, arena.attack_rng.bytes(1024), w.clock.now_s + 5);
        w.clock.advance(arena.policy.commit_interval);
        auto r = w.pump();
        if (r && !committed_ok(std::move(*r)).ok()) return error(Err::ProgramFault, "setup commit failed");
    }
    LedgerSnapshot pre_attack = snapshot_ledger(w);

    uint32_t bursts = parameters.value("bursts", 12u);
    uint32_t rewrites = parameters.value("rewrites_per_burst", 12u);
    int64_t first_flag_run = -1;
    uint32_t garbage_versions = 0;

    for (uint32_t b = 1; b <= bursts; ++b) {
        for (uint32_t r = 0; r < rewrites; ++r) {
            (void)w.host.app_write(target, arena.attack_rng.bytes(1024), w.clock.now_s);
            w.clock.advance(10);
        }
        w.host.trigger_manual();
        auto run = w.pump();
        if (!run) return error(Err::ProgramFault, "trigger did not fire");
        auto ok = committed_ok(std::move(*run));
        if (!ok.ok()) return ok.err();
        if (ok.value().report) {
            garbage_versions += uint32_t(ok.value().report->committed.size());
            if (!ok.value().report->anomalies.empty() && first_flag_run < 0) {
                first_flag_run = int64_t(b);
                out.detection_signals.push_back("anomaly:" + target);
            }
        }
        w.clock.advance(60);
    }

    std::vector<std::string> lost;
    double fraction = recoverable_fraction(w, pre_attack, {}, &lost);
    out.data_loss = lost;
    out.fields["anomaly_flagged"] = first_flag_run > 0;
    out.fields["first_flag_run"] = first_flag_run;
    out.fields["garbage_versions_added"] = garbage_versions;
    out.fields["pre_attack_version_deleted"] = fraction < 1.0;
    return {};
}

Result<void> attack_clock_attack(Arena& arena, const json&, AttackOutcome& out) {
    SimWorld& w = *arena.world;
    const std::string target = arena.file_names.front();

    // Build one hidden version, then one legitimate token acceptance.
    (void)w.host.app_write(target, arena.attack_rng.bytes(1024), w.clock.now_s + 5);
    w.clock.advance(arena.policy.commit_interval);
    auto r1 = w.pump();
    if (r1 && !committed_ok(std::move(*r1)).ok()) return error(Err::ProgramFault, "setup commit failed");

    TimeToken accepted = w.authority.issue(w.clock.now_s, w.rng);
    w.host.trigger_manual();
    auto r2 = w.pump(accepted);
    if (!r2) return error(Err::ProgramFault, "trigger did not fire");
    {
        auto ok = committed_ok(std::move(*r2));
        if (!ok.ok()) return ok.err();
        if (ok.value().report && ok.value().report->token_error)
            return error(Err::ProgramFault, "legit token rejected");
    }

    auto hidden_versions = [&]() -> uint64_t {
        auto view = w.recover();
        uint64_t n = 0;
        for (const auto& e : view.value().list(true))
            if (e.hidden) ++n;
        return n;
    };
    uint64_t versions_before = hidden_versions();

    // Rootkit rolls the system clock far past the aging threshold.
    w.clock.advance(3 * arena.policy.age_threshold);

    // No token at all: aging must not run.
    w.host.trigger_manual();
    auto no_token = w.pump();
    if (!no_token) return error(Err::ProgramFault, "trigger did not fire");
    auto no_token_ok = committed_ok(std::move(*no_token));
    if (!no_token_ok.ok()) return no_token_ok.err();
    uint64_t aged_without_token = no_token_ok.value().report ? no_token_ok.value().report->deletions.size() : 0;

    // Forged "future" token under the adversary's own key.
    Bytes evil_seed(32, 0x66);
    TimeAuthority evil(evil_seed);
    TimeToken forged = evil.issue(w.clock.now_s + 1000, arena.attack_rng);
    w.host.trigger_manual();
    auto forged_run = w.pump(forged);
    if (!forged_run) return error(Err::ProgramFault, "trigger did not fire");
    auto forged_ok = committed_ok(std::move(*forged_run));
    if (!forged_ok.ok()) return forged_ok.err();
    std::string forged_err =
        forged_ok.value().report && forged_ok.value().report->token_error ? *forged_ok.value().report->token_error : "none";

    // Replay of the previously accepted token.
    w.host.trigger_manual();
    auto replay_run = w.pump(accepted);
    if (!replay_run) return error(Err::ProgramFault, "trigger did not fire");
    auto replay_ok = committed_ok(std::move(*replay_run));
    if (!replay_ok.ok()) return replay_ok.err();
    std::string replay_err =
        replay_ok.value().report && replay_ok.value().report->token_error ? *replay_ok.value().report->token_error : "none";

    out.fields["aged_deletions_without_token"] = aged_without_token;
    out.fields["forged_token_error"] = forged_err;
    out.fields["replay_token_error"] = replay_err;
    out.fields["old_versions_present"] = hidden_versions() >= versions_before;
    if (forged_err == "BadSignature") out.detection_signals.push_back("forged_token_rejected");
    if (replay_err == "StaleToken") out.detection_signals.push_back("replayed_token_rejected");
    return {};
}

Result<void> attack_persistent_ransomware(Arena& arena, const json& parameters, AttackOutcome& out) {
    SimWorld& w = *arena.world;

    // One ordinary cycle so real history exists.
    (void)w.host.app_write(arena.file_names.front(), arena.attack_rng.bytes(2048), w.clock.now_s + 5);
    w.clock.advance(arena.policy.commit_interval);
    auto legit = w.pump();
    if (legit && !committed_ok(std::move(*legit)).ok()) return error(Err::ProgramFault, "setup commit failed");

    LedgerSnapshot pre_attack = snapshot_ledger(w);

    // Encrypt everything on the original side, then let the scheduled commit
    // push the garbage as new versions (the malware stays hidden).
    w.clock.advance(100);
    for (const auto& name : arena.file_names) {
        (void)w.host.app_write(name, arena.attack_rng.bytes(w.host.files().at(name).content.size()),
                               w.clock.now_s);
        w.clock.advance(1);
    }
    w.clock.advance(arena.policy.commit_interval);
    auto garbage_run = w.pump();
    if (!garbage_run) return error(Err::ProgramFault, "scheduled commit did not fire");
    auto ok = committed_ok(std::move(*garbage_run));
    if (!ok.ok()) return ok.err();
    uint64_t garbage_versions = ok.value().report ? ok.value().report->committed.size() : 0;

    // Ransom time: simulated OS wipe; recovery must still see everything.
    bool wipe = parameters.value("wipe_os", true);
    if (wipe) {
        Bytes zeros(size_t(w.cfg.unprotected_sectors) * kSectorSize, 0);
        (void)w.sed.write_sectors(0, zeros);
        w.host.wipe();
    }

    std::vector<std::string> lost;
    double fraction = recoverable_fraction(w, pre_attack, {}, &lost);
    out.data_loss = lost;
    out.fields["garbage_versions_added"] = garbage_versions;
    out.fields["pre_attack_recoverable_fraction"] = fraction;
    out.fields["recovery_after_wipe"] = wipe;
    return {};
}

}  // namespace

Result<AttackOutcome> run_scenario(const AttackScenario& scenario, uint64_t seed) {
    auto arena = setup_arena(scenario.parameters, seed);
    if (!arena.ok()) return arena.err();

    AttackOutcome out;
    out.scenario_id = scenario.id;
    out.protected_digest_before = protected_digest(*arena.value().world);
    LedgerSnapshot pre = snapshot_ledger(*arena.value().world);

    Result<void> body = [&]() -> Result<void> {
        Arena& a = arena.value();
        if (scenario.id == "direct_write") return attack_direct_write(a, scenario.parameters, out);
        if (scenario.id == "credential_theft") return attack_credential_theft(a, scenario.parameters, out);
        if (scenario.id == "binary_tamper") return attack_binary_tamper(a, scenario.parameters, out);
        if (scenario.id == "forged_ui") return attack_forged_ui(a, scenario.parameters, out);
        if (scenario.id == "driver_kill") return attack_driver_kill(a, scenario.parameters, out);
        if (scenario.id == "version_exhaustion") return attack_version_exhaustion(a, scenario.parameters, out);
        if (scenario.id == "clock_attack") return attack_clock_attack(a, scenario.parameters, out);
        if (scenario.id == "persistent_ransomware")
            return attack_persistent_ransomware(a, scenario.parameters, out);
        return error(Err::BadArgument, "unknown scenario id");
    }();
    if (!body.ok()) return body.err();

    SimWorld& w = *arena.value().world;
    out.protected_digest_after = protected_digest(w);
    out.fields["digest_unchanged"] = out.protected_digest_before == out.protected_digest_after;

    // The core claim, checked for every scenario: nothing committed before
    // the attack became unreadable, short of legitimate deletions.
    std::set<std::string> legit;
    for (const auto& e : w.trace.events())
        if (e.kind == "report" && e.detail.rfind("deleted\t", 0) == 0) legit.insert(e.detail.substr(8));
    std::vector<std::string> lost;
    double fraction = recoverable_fraction(w, pre, legit, &lost);
    out.fields["pre_attack_recoverable"] = fraction == 1.0;

    // The adversary's observable trace must never contain the secrets.
    const LockingRange* range = w.sed.find_range(w.env.protected_range_id);
    std::string visible = host_visible_text(w);
    bool secret_leak = (range && text_contains_secret(visible, range->credential)) ||
                       text_contains_secret(visible, to_bytes(arena.value().policy.avatar));
    out.fields["secrets_in_host_artifacts"] = secret_leak;
    return out;
}

std::vector<std::string> outcome_mismatches(const AttackOutcome& outcome, const json& expected) {
    std::vector<std::string> diffs;
    json actual = outcome.to_json();
    for (const auto& [key, value] : expected.items()) {
        if (!actual.contains(key)) {
            diffs.push_back(key + ": expected " + value.dump() + ", missing from outcome");
        } else if (actual[key] != value) {
            diffs.push_back(key + ": expected " + value.dump() + ", got " + actual[key].dump());
        }
    }
    return diffs;
}

}  // namespace inuksuk
