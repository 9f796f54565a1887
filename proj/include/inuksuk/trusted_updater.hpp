#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "inuksuk/bytes.hpp"
#include "inuksuk/result.hpp"
#include "inuksuk/rng.hpp"
#include "inuksuk/tee_runtime.hpp"
#include "inuksuk/time_authority.hpp"
#include "inuksuk/vault_fs.hpp"

namespace inuksuk {

// NVRAM slot holding the sealed updater state.
constexpr uint32_t kSealedStateNvramIndex = 0x1500;

// User preferences governing commits and auto-deletion. The avatar is the
// per-deployment secret shown only inside genuine sessions; it is excluded
// from the plaintext on-disk copy.
struct UpdatePolicy {
    uint64_t commit_interval = 8 * 3600;         // seconds
    uint64_t max_file_size = 100 * 1024 * 1024;  // bytes
    uint32_t version_limit = 100;                // hidden versions kept per file
    uint64_t age_threshold = 365 * 24 * 3600;    // seconds; 0 disables aging
    uint32_t anomaly_version_threshold = 100;    // would-be versions per file
    std::string avatar;

    // All six keys, for the provisioning input file.
    static Result<UpdatePolicy> parse(const std::string& key_value_text);
    // The five non-secret keys; this is what lands on the unprotected partition.
    std::string plaintext_copy() const;
};

struct CommitItem {
    std::string base_name;
    uint64_t version_timestamp;
    uint64_t size;
};

struct SkipItem {
    std::string base_name;
    std::string reason;
};

struct AnomalyItem {
    std::string base_name;
    uint32_t versions_this_run;   // modifications observed since the last commit
    uint32_t window_total;        // summed over the recent-report window
};

struct UpdateReport {
    uint64_t run_timestamp = 0;
    std::vector<CommitItem> committed;
    std::vector<SkipItem> skipped;
    std::vector<AnomalyItem> anomalies;
    std::string avatar_shown;
    std::vector<std::string> deletions;
    bool policy_mismatch = false;
    std::optional<std::string> token_error;

    // Line-oriented record, one committed/skipped/anomaly/deletion per line.
    // The transcript copy never carries the avatar itself.
    std::vector<std::string> to_lines(bool redact_avatar) const;
};

// Secrets and counters living only inside the sealed blob.
struct SealedState {
    Bytes sed_credential;  // 32 bytes
    UpdatePolicy policy;
    uint64_t last_commit_time = 0;
    uint64_t last_accepted_ntp = 0;
    Bytes ntp_public_key;
    // Per-file (run_time, would-be versions) pairs for the last few reports;
    // burst detection sums these.
    std::map<std::string, std::vector<std::pair<uint64_t, uint32_t>>> anomaly_window;

    static constexpr size_t kWindowReports = 10;

    Bytes serialize() const;
    static Result<SealedState> deserialize(std::span<const uint8_t> in);
};

// Host-side view of one original file, as handed to the updater.
struct OriginalFileInfo {
    std::string name;
    Bytes content;
    uint64_t modified = 0;
    uint32_t mods_since_commit = 0;
};

// Fixed addresses the updater is built with (public, not secret).
struct UpdaterEnv {
    uint32_t protected_range_id = 0;
    uint64_t protected_base_lba = 0;
    uint64_t protected_length = 0;  // sectors
    uint32_t fs_clusters = 0;
    uint32_t fs_cluster_size = kDefaultClusterSize;
    uint32_t fs_dir_capacity = kDefaultDirCapacity;
    uint32_t nvram_index = kSealedStateNvramIndex;
};

namespace updater {

// base_name + "." + zero-padded timestamp (+ "." + sequence on collision).
std::string version_name(const std::string& base, uint64_t timestamp, uint32_t seq = 0);
std::optional<std::pair<std::string, uint64_t>> parse_version_name(const std::string& name);

Result<SealedState> load_sealed_state(TeeSession& session, uint32_t nvram_index);
Result<void> store_sealed_state(TeeSession& session, uint32_t nvram_index, const SealedState& state,
                                DetRng& rng);

void render_banner(TeeSession& session, const SealedState& state);
Result<void> verify_policy(const SealedState& state, const std::optional<std::string>& plaintext);

struct ProvisionResult {
    UpdateReport report;
    std::string plaintext_policy;
};

// First invocation: generates the SED credential, configures the protected
// range, formats the vault, seals state, commits the initial copies.
Result<ProvisionResult> provision(TeeSession& session, UpdaterEnv& env,
                                  const std::vector<OriginalFileInfo>& selection, UpdatePolicy policy,
                                  std::span<const uint8_t> admin_credential, Bytes ntp_public_key,
                                  uint64_t now, DetRng& rng);

// One committed version per changed file; deletions on the original side are
// never propagated. NoSpace stops the run, leaving committed files in place.
// commit_all bypasses the last-modified filter (first-invocation copying).
void commit_files(VaultFs& fs, SealedState& state, const std::vector<OriginalFileInfo>& listing,
                  uint64_t now, UpdateReport& report, bool commit_all = false);

// With a verified token: aging plus version-limiting; without a token aging
// is skipped entirely; a bad token deletes nothing.
Result<std::vector<std::string>> auto_delete(VaultFs& fs, SealedState& state,
                                             const std::optional<TimeToken>& token);

// Interactive selector; tokens: up/k, down/j, toggle/space, group/g,
// confirm/y (done + yes), abort/n/q. Selected rows carry the marker.
Result<std::vector<std::string>> delete_browser(TeeSession& session, VaultFs& fs);

struct SessionOutput {
    UpdateReport report;
};

// Full commit session: unseal, banner, policy check, unlock, commit,
// auto-delete, reseal, relock. Aborts before any unlock on UnsealFailed.
Result<SessionOutput> run_commit_session(TeeSession& session, const UpdaterEnv& env,
                                         const std::vector<OriginalFileInfo>& listing,
                                         const std::optional<std::string>& plaintext_policy,
                                         const std::optional<TimeToken>& token, DetRng& rng,
                                         Trace* trace = nullptr);

// Deletion session: unseal, banner, browser, auto-delete bookkeeping skipped.
Result<SessionOutput> run_delete_session(TeeSession& session, const UpdaterEnv& env, DetRng& rng,
                                         Trace* trace = nullptr);

}  // namespace updater

}  // namespace inuksuk
