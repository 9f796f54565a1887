#include "inuksuk/trusted_updater.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "inuksuk/block_device.hpp"
#include "inuksuk/crypto.hpp"
#include "json.hpp"

namespace inuksuk {

using nlohmann::json;

Result<UpdatePolicy> UpdatePolicy::parse(const std::string& text) {
    UpdatePolicy p;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) return error(Err::BadArgument, "malformed line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const char* key) -> Result<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return error(Err::BadArgument, std::string("missing policy key: ") + key);
        return it->second;
    };
    auto need_num = [&](const char* key) -> Result<uint64_t> {
        auto v = need(key);
        if (!v.ok()) return v.err();
        try {
            size_t pos = 0;
            uint64_t n = std::stoull(v.value(), &pos);
            if (pos != v.value().size()) return error(Err::BadArgument, std::string("bad number for ") + key);
            return n;
        } catch (...) {
            return error(Err::BadArgument, std::string("bad number for ") + key);
        }
    };

    auto interval = need_num("commit_interval");
    if (!interval.ok()) return interval.err();
    p.commit_interval = interval.value();
    auto max_size = need_num("max_file_size");
    if (!max_size.ok()) return max_size.err();
    p.max_file_size = max_size.value();
    auto limit = need_num("version_limit");
    if (!limit.ok()) return limit.err();
    if (limit.value() < 1) return error(Err::BadArgument, "version_limit must be >= 1");
    p.version_limit = uint32_t(limit.value());
    auto age = need_num("age_threshold");
    if (!age.ok()) return age.err();
    p.age_threshold = age.value();
    auto anomaly = need_num("anomaly_version_threshold");
    if (!anomaly.ok()) return anomaly.err();
    p.anomaly_version_threshold = uint32_t(anomaly.value());
    auto avatar = need("avatar");
    if (!avatar.ok()) return avatar.err();
    if (avatar.value().empty()) return error(Err::BadArgument, "avatar must be non-empty");
    p.avatar = avatar.value();
    return p;
}

std::string UpdatePolicy::plaintext_copy() const {
    // The avatar stays sealed; writing it here would hand the forged-UI
    // attacker the one secret the banner check depends on.
    std::string out;
    out += "commit_interval=" + std::to_string(commit_interval) + "\n";
    out += "max_file_size=" + std::to_string(max_file_size) + "\n";
    out += "version_limit=" + std::to_string(version_limit) + "\n";
    out += "age_threshold=" + std::to_string(age_threshold) + "\n";
    out += "anomaly_version_threshold=" + std::to_string(anomaly_version_threshold) + "\n";
    return out;
}

std::vector<std::string> UpdateReport::to_lines(bool redact_avatar) const {
    std::vector<std::string> lines;
    lines.push_back("report\trun=" + std::to_string(run_timestamp));
    lines.push_back("avatar\t" + (redact_avatar ? std::string("[shown]") : avatar_shown));
    lines.push_back(std::string("policy_check\t") + (policy_mismatch ? "mismatch" : "ok"));
    for (const auto& c : committed)
        lines.push_back("committed\t" + c.base_name + "\t" + std::to_string(c.version_timestamp) + "\t" +
                        std::to_string(c.size));
    for (const auto& s : skipped) lines.push_back("skipped\t" + s.base_name + "\t" + s.reason);
    for (const auto& a : anomalies)
        lines.push_back("anomaly\t" + a.base_name + "\t" + std::to_string(a.versions_this_run) + "\t" +
                        std::to_string(a.window_total));
    for (const auto& d : deletions) lines.push_back("deleted\t" + d);
    if (token_error) lines.push_back("token_error\t" + *token_error);
    lines.push_back("end_report\tcommitted=" + std::to_string(committed.size()));
    return lines;
}

Bytes SealedState::serialize() const {
    json j;
    j["sed_credential"] = hex_encode(sed_credential);
    j["policy"] = {{"commit_interval", policy.commit_interval},
                   {"max_file_size", policy.max_file_size},
                   {"version_limit", policy.version_limit},
                   {"age_threshold", policy.age_threshold},
                   {"anomaly_version_threshold", policy.anomaly_version_threshold},
                   {"avatar", policy.avatar}};
    j["last_commit_time"] = last_commit_time;
    j["last_accepted_ntp"] = last_accepted_ntp;
    j["ntp_public_key"] = hex_encode(ntp_public_key);
    json window = json::object();
    for (const auto& [base, entries] : anomaly_window) {
        json arr = json::array();
        for (const auto& [t, c] : entries) arr.push_back({t, c});
        window[base] = arr;
    }
    j["anomaly_window"] = window;
    return to_bytes(j.dump());
}

Result<SealedState> SealedState::deserialize(std::span<const uint8_t> in) {
    try {
        json j = json::parse(in.begin(), in.end());
        SealedState s;
        s.sed_credential = hex_decode(j.at("sed_credential").get<std::string>());
        const auto& p = j.at("policy");
        s.policy.commit_interval = p.at("commit_interval").get<uint64_t>();
        s.policy.max_file_size = p.at("max_file_size").get<uint64_t>();
        s.policy.version_limit = p.at("version_limit").get<uint32_t>();
        s.policy.age_threshold = p.at("age_threshold").get<uint64_t>();
        s.policy.anomaly_version_threshold = p.at("anomaly_version_threshold").get<uint32_t>();
        s.policy.avatar = p.at("avatar").get<std::string>();
        s.last_commit_time = j.at("last_commit_time").get<uint64_t>();
        s.last_accepted_ntp = j.at("last_accepted_ntp").get<uint64_t>();
        s.ntp_public_key = hex_decode(j.at("ntp_public_key").get<std::string>());
        for (const auto& [base, arr] : j.at("anomaly_window").items()) {
            for (const auto& pair : arr)
                s.anomaly_window[base].emplace_back(pair.at(0).get<uint64_t>(), pair.at(1).get<uint32_t>());
        }
        return s;
    } catch (const std::exception& e) {
        return error(Err::BadArgument, std::string("sealed state parse: ") + e.what());
    }
}

namespace updater {

std::string version_name(const std::string& base, uint64_t timestamp, uint32_t seq) {
    char ts[16];
    std::snprintf(ts, sizeof ts, "%010llu", static_cast<unsigned long long>(timestamp));
    std::string name = base + "." + ts;
    if (seq > 0) {
        char sq[16];
        std::snprintf(sq, sizeof sq, "%03u", seq);
        name += std::string(".") + sq;
    }
    return name;
}

static bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<std::pair<std::string, uint64_t>> parse_version_name(const std::string& name) {
    // base.TTTTTTTTTT
    if (name.size() > 11 && name[name.size() - 11] == '.' && all_digits(std::string_view(name).substr(name.size() - 10))) {
        uint64_t ts = std::stoull(name.substr(name.size() - 10));
        return std::make_pair(name.substr(0, name.size() - 11), ts);
    }
    // base.TTTTTTTTTT.SSS
    if (name.size() > 15 && name[name.size() - 4] == '.' && name[name.size() - 15] == '.' &&
        all_digits(std::string_view(name).substr(name.size() - 3)) &&
        all_digits(std::string_view(name).substr(name.size() - 14, 10))) {
        uint64_t ts = std::stoull(name.substr(name.size() - 14, 10));
        return std::make_pair(name.substr(0, name.size() - 15), ts);
    }
    return std::nullopt;
}

Result<SealedState> load_sealed_state(TeeSession& session, uint32_t nvram_index) {
    auto raw = session.tpm().nvram_read(nvram_index);
    if (!raw.ok()) return error(Err::UnsealFailed, std::string("nvram: ") + err_name(raw.code()));
    auto blob = SealedBlob::deserialize(raw.value());
    if (!blob.ok()) return error(Err::UnsealFailed, std::string("blob: ") + err_name(blob.code()));
    auto plain = session.tpm().unseal(blob.value());
    if (!plain.ok()) return error(Err::UnsealFailed, std::string("unseal: ") + err_name(plain.code()));
    auto state = SealedState::deserialize(plain.value());
    if (!state.ok()) return error(Err::UnsealFailed, "sealed state corrupt");
    return state;
}

Result<void> store_sealed_state(TeeSession& session, uint32_t nvram_index, const SealedState& state,
                                DetRng& rng) {
    std::vector<PcrBinding> binding{{kLaunchPcr, session.tpm().pcr_value(kLaunchPcr)}};
    Bytes nonce = rng.bytes(crypto::kAeadNonceBytes);
    auto blob = session.tpm().seal(state.serialize(), binding, nonce);
    if (!blob.ok()) return blob.err();
    if (!session.tpm().nvram_defined(nvram_index)) {
        auto d = session.tpm().nvram_define(nvram_index, binding);
        if (!d.ok()) return d;
    }
    return session.tpm().nvram_write(nvram_index, blob.value().serialize());
}

void render_banner(TeeSession& session, const SealedState& state) {
    session.ui().write(state.policy.avatar);
}

Result<void> verify_policy(const SealedState& state, const std::optional<std::string>& plaintext) {
    if (!plaintext) return error(Err::Mismatch, "plaintext policy missing");
    std::map<std::string, uint64_t> kv;
    std::istringstream in(*plaintext);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) return error(Err::Mismatch, "malformed plaintext policy");
        try {
            kv[line.substr(0, eq)] = std::stoull(line.substr(eq + 1));
        } catch (...) {
            return error(Err::Mismatch, "malformed plaintext policy");
        }
    }
    const UpdatePolicy& p = state.policy;
    auto same = [&](const char* key, uint64_t sealed_value) {
        auto it = kv.find(key);
        return it != kv.end() && it->second == sealed_value;
    };
    if (kv.size() == 5 && same("commit_interval", p.commit_interval) && same("max_file_size", p.max_file_size) &&
        same("version_limit", p.version_limit) && same("age_threshold", p.age_threshold) &&
        same("anomaly_version_threshold", p.anomaly_version_threshold))
        return {};
    return error(Err::Mismatch, "plaintext policy diverges from sealed policy");
}

void commit_files(VaultFs& fs, SealedState& state, const std::vector<OriginalFileInfo>& listing,
                  uint64_t now, UpdateReport& report, bool commit_all) {
    std::vector<OriginalFileInfo> files = listing;
    std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) { return a.name < b.name; });

    bool out_of_space = false;
    for (const auto& f : files) {
        if (!commit_all && f.modified <= state.last_commit_time) continue;
        if (out_of_space) {
            report.skipped.push_back({f.name, "no space"});
            continue;
        }
        if (f.content.size() > state.policy.max_file_size) {
            report.skipped.push_back({f.name, "exceeds max_file_size"});
            continue;
        }
        // Room for ".TTTTTTTTTT.SSS" must remain below the name limit.
        if (f.name.size() > kMaxNameBytes - 15 || f.name.empty() ||
            f.name.find('/') != std::string::npos || f.name.find('\\') != std::string::npos) {
            report.skipped.push_back({f.name, "invalid name"});
            continue;
        }

        auto existing = fs.find(f.name);
        std::string rolled_back_version;
        if (existing) {
            uint32_t seq = 0;
            std::string vname = version_name(f.name, existing->modified, seq);
            while (fs.find(vname)) vname = version_name(f.name, existing->modified, ++seq);
            auto r1 = fs.rename(f.name, vname);
            if (!r1.ok()) {
                report.skipped.push_back({f.name, err_name(r1.code())});
                continue;
            }
            (void)fs.set_hidden(vname, true);
            rolled_back_version = vname;
        }
        auto created = fs.create_write(f.name, f.content, f.modified);
        if (!created.ok()) {
            if (!rolled_back_version.empty()) {
                // Put the previous live version back so the latest pointer stays valid.
                (void)fs.set_hidden(rolled_back_version, false);
                (void)fs.rename(rolled_back_version, f.name);
            }
            if (created.code() == Err::NoSpace) {
                out_of_space = true;
                report.skipped.push_back({f.name, "no space"});
                continue;
            }
            report.skipped.push_back({f.name, err_name(created.code())});
            continue;
        }
        report.committed.push_back({f.name, f.modified, f.content.size()});

        uint32_t would_be = std::max<uint32_t>(1, f.mods_since_commit);
        auto& window = state.anomaly_window[f.name];
        window.emplace_back(now, would_be);
        if (window.size() > SealedState::kWindowReports)
            window.erase(window.begin(), window.end() - SealedState::kWindowReports);
        uint64_t window_total = 0;
        for (const auto& [t, c] : window) window_total += c;
        if (would_be > state.policy.anomaly_version_threshold ||
            window_total > state.policy.anomaly_version_threshold)
            report.anomalies.push_back({f.name, would_be, uint32_t(window_total)});
    }
}

Result<std::vector<std::string>> auto_delete(VaultFs& fs, SealedState& state,
                                             const std::optional<TimeToken>& token) {
    std::optional<uint64_t> aging_now;
    if (token) {
        auto verified = verify_token(*token, state.ntp_public_key, state.last_accepted_ntp);
        if (!verified.ok()) return verified.err();  // nothing deleted on a bad token
        state.last_accepted_ntp = verified.value();
        aging_now = verified.value();
    }

    // Group hidden history entries by base name.
    std::map<std::string, std::vector<DirEntry>> versions;
    for (const auto& e : fs.list(true)) {
        if (!e.hidden) continue;
        if (auto parsed = parse_version_name(e.name)) versions[parsed->first].push_back(e);
    }

    std::vector<std::string> deletions;
    for (auto& [base, vs] : versions) {
        std::sort(vs.begin(), vs.end(),
                  [](const auto& a, const auto& b) { return std::tie(a.modified, a.name) < std::tie(b.modified, b.name); });
        std::vector<DirEntry> remaining;
        for (const auto& v : vs) {
            bool aged = aging_now && state.policy.age_threshold > 0 && *aging_now > state.policy.age_threshold &&
                        v.modified < *aging_now - state.policy.age_threshold;
            if (aged) {
                if (fs.delete_entry(v.name).ok()) deletions.push_back(v.name);
            } else {
                remaining.push_back(v);
            }
        }
        // Version-limiting needs no clock; the live entry is never counted.
        size_t excess = remaining.size() > state.policy.version_limit
                            ? remaining.size() - state.policy.version_limit
                            : 0;
        for (size_t i = 0; i < excess; ++i)
            if (fs.delete_entry(remaining[i].name).ok()) deletions.push_back(remaining[i].name);
    }
    return deletions;
}

namespace {

const char* kSelectedMarker = "»";  // Fig-3 style selection marker

void render_browser(UiChannel& ui, const std::vector<DirEntry>& entries, const std::vector<char>& selected,
                    size_t cursor) {
    ui.write("-- protected files (space=toggle  g=group  y=confirm  n=abort) --");
    for (size_t i = 0; i < entries.size(); ++i) {
        std::string line = i == cursor ? "> " : "  ";
        line += selected[i] ? kSelectedMarker : " ";
        line += " " + entries[i].name + "\t" + std::to_string(entries[i].size) + "\t" +
                std::to_string(entries[i].modified) + (entries[i].hidden ? "\t(version)" : "");
        ui.write(line);
    }
}

}  // namespace

Result<std::vector<std::string>> delete_browser(TeeSession& session, VaultFs& fs) {
    auto entries = fs.list(true);
    UiChannel& ui = session.ui();
    if (entries.empty()) {
        ui.write("no files on the protected partition");
        return std::vector<std::string>{};
    }

    std::vector<char> selected(entries.size(), 0);
    size_t cursor = 0;
    int anchor = -1;
    render_browser(ui, entries, selected, cursor);

    auto perform = [&]() -> std::vector<std::string> {
        std::vector<std::string> deletions;
        for (size_t i = 0; i < entries.size(); ++i) {
            if (!selected[i]) continue;
            if (fs.delete_entry(entries[i].name).ok()) deletions.push_back(entries[i].name);
        }
        ui.write("deleted " + std::to_string(deletions.size()) + " file(s)");
        return deletions;
    };

    while (true) {
        if (!ui.has_input()) return error(Err::Aborted, "input exhausted");
        std::string tok = ui.read();
        if (tok == "j" || tok == "down") {
            if (cursor + 1 < entries.size()) ++cursor;
        } else if (tok == "k" || tok == "up") {
            if (cursor > 0) --cursor;
        } else if (tok == "space" || tok == "toggle") {
            selected[cursor] = !selected[cursor];
        } else if (tok == "g" || tok == "group") {
            if (anchor < 0) {
                anchor = int(cursor);
            } else {
                size_t lo = std::min(size_t(anchor), cursor), hi = std::max(size_t(anchor), cursor);
                for (size_t i = lo; i <= hi; ++i) selected[i] = 1;
                anchor = -1;
            }
        } else if (tok == "y" || tok == "done") {
            size_t n = size_t(std::count(selected.begin(), selected.end(), 1));
            ui.write("delete " + std::to_string(n) + " file(s)? (y/n)");
            std::string answer = ui.read();
            if (answer == "y" || answer == "yes" || answer == "confirm") return perform();
            return error(Err::Aborted, "declined at confirmation");
        } else if (tok == "confirm" || tok == "yes") {
            return perform();
        } else if (tok == "n" || tok == "q" || tok == "abort") {
            return error(Err::Aborted, "aborted");
        }
        render_browser(ui, entries, selected, cursor);
    }
}

Result<ProvisionResult> provision(TeeSession& session, UpdaterEnv& env,
                                  const std::vector<OriginalFileInfo>& selection, UpdatePolicy policy,
                                  std::span<const uint8_t> admin_credential, Bytes ntp_public_key,
                                  uint64_t now, DetRng& rng) {
    if (session.tpm().nvram_defined(env.nvram_index))
        return error(Err::AlreadyProvisioned, "sealed state already present");

    session.ui().write(policy.avatar);  // banner precedes all other output

    Bytes credential = rng.bytes(kCredentialBytes);
    auto range = session.sed().configure_range(admin_credential, env.protected_base_lba,
                                               env.protected_length, true, false, credential);
    if (!range.ok()) return range.err();
    env.protected_range_id = range.value();

    auto unlocked = session.unlock_write(env.protected_range_id, credential);
    if (!unlocked.ok()) return unlocked.err();

    SedRegion region(session.sed(), env.protected_base_lba, env.protected_length);
    auto fs = VaultFs::format(region, env.fs_clusters, env.fs_cluster_size, env.fs_dir_capacity);
    if (!fs.ok()) return fs.err();

    SealedState state;
    state.sed_credential = credential;
    state.policy = std::move(policy);
    state.last_commit_time = 0;
    state.last_accepted_ntp = 0;
    state.ntp_public_key = std::move(ntp_public_key);

    UpdateReport report;
    report.run_timestamp = now;
    report.avatar_shown = state.policy.avatar;
    commit_files(fs.value(), state, selection, now, report, /*commit_all=*/true);
    state.last_commit_time = now;

    auto stored = store_sealed_state(session, env.nvram_index, state, rng);
    if (!stored.ok()) return stored.err();

    (void)session.lock_write(env.protected_range_id, credential);

    ProvisionResult out;
    out.plaintext_policy = state.policy.plaintext_copy();
    out.report = std::move(report);
    return out;
}

static void emit_report(TeeSession& session, const UpdateReport& report, Trace* trace) {
    for (const auto& line : report.to_lines(/*redact_avatar=*/false)) session.ui().write(line);
    if (trace)
        for (const auto& line : report.to_lines(/*redact_avatar=*/true))
            trace->append(session.now(), TraceWorld::Tee, "report", line);
}

Result<SessionOutput> run_commit_session(TeeSession& session, const UpdaterEnv& env,
                                         const std::vector<OriginalFileInfo>& listing,
                                         const std::optional<std::string>& plaintext_policy,
                                         const std::optional<TimeToken>& token, DetRng& rng,
                                         Trace* trace) {
    auto state = load_sealed_state(session, env.nvram_index);
    if (!state.ok()) return state.err();  // fail closed: nothing unlocked yet

    render_banner(session, state.value());

    UpdateReport report;
    report.run_timestamp = session.now();
    report.avatar_shown = state.value().policy.avatar;
    report.policy_mismatch = !verify_policy(state.value(), plaintext_policy).ok();

    auto unlocked = session.unlock_write(env.protected_range_id, state.value().sed_credential);
    if (!unlocked.ok()) return unlocked.err();

    SedRegion region(session.sed(), env.protected_base_lba, env.protected_length);
    auto fs = VaultFs::open(region);
    if (!fs.ok()) return fs.err();

    commit_files(fs.value(), state.value(), listing, session.now(), report);

    auto deletions = auto_delete(fs.value(), state.value(), token);
    if (deletions.ok())
        report.deletions = deletions.value();
    else
        report.token_error = err_name(deletions.code());

    state.value().last_commit_time = session.now();
    auto stored = store_sealed_state(session, env.nvram_index, state.value(), rng);
    if (!stored.ok()) return stored.err();

    (void)session.lock_write(env.protected_range_id, state.value().sed_credential);
    emit_report(session, report, trace);
    return SessionOutput{std::move(report)};
}

Result<SessionOutput> run_delete_session(TeeSession& session, const UpdaterEnv& env, DetRng& rng,
                                         Trace* trace) {
    auto state = load_sealed_state(session, env.nvram_index);
    if (!state.ok()) return state.err();

    render_banner(session, state.value());

    UpdateReport report;
    report.run_timestamp = session.now();
    report.avatar_shown = state.value().policy.avatar;

    auto unlocked = session.unlock_write(env.protected_range_id, state.value().sed_credential);
    if (!unlocked.ok()) return unlocked.err();

    SedRegion region(session.sed(), env.protected_base_lba, env.protected_length);
    auto fs = VaultFs::open(region);
    if (!fs.ok()) return fs.err();

    auto deletions = delete_browser(session, fs.value());
    if (deletions.ok()) report.deletions = deletions.value();
    // Aborted: no deletions; the report still records the session.

    (void)rng;
    (void)session.lock_write(env.protected_range_id, state.value().sed_credential);
    emit_report(session, report, trace);
    return SessionOutput{std::move(report)};
}

}  // namespace updater

}  // namespace inuksuk
