#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inuksuk/host_world.hpp"
#include "inuksuk/rng.hpp"
#include "inuksuk/sed_device.hpp"
#include "inuksuk/tee_runtime.hpp"
#include "inuksuk/time_authority.hpp"
#include "inuksuk/tpm.hpp"
#include "inuksuk/trace.hpp"
#include "inuksuk/trusted_updater.hpp"

namespace inuksuk {

struct WorldConfig {
    uint64_t seed = 1;
    uint64_t unprotected_sectors = 4096;  // 2 MiB original partition region
    uint32_t fs_clusters = 2048;          // 16 MiB protected data area
    uint32_t fs_cluster_size = kDefaultClusterSize;
    uint32_t fs_dir_capacity = 512;
    uint64_t transition_cost_s = 3;
};

struct SessionOutcome {
    SessionResult session;
    std::optional<UpdateReport> report;
    // What the user saw on the TEE display; never host-visible.
    std::vector<std::string> ui_output;
};

// Composition root: one machine with its drive, secure element, TEE runtime,
// host world and time authority, plus the provisioning/commit drivers the
// CLI, scenarios and tests share.
class SimWorld {
public:
    explicit SimWorld(WorldConfig cfg);

    WorldConfig cfg;
    SimClock clock;
    Trace trace;
    DetRng rng;
    Bytes psid;
    Bytes admin_credential;
    SedDevice sed;
    Tpm tpm;
    TeeRuntime tee;
    HostWorld host;
    TimeAuthority authority;
    UpdaterEnv env;
    bool provisioned = false;

    // The measured updater binary. Constant bytes: the measurement must be
    // reproducible across reboots and state reloads.
    static Bytes genuine_updater_bytes();
    ProgramImage updater_image(Bytes image_bytes,
                               std::function<Result<void>(TeeSession&)> entry) const;

    Result<SessionOutcome> provision(UpdatePolicy policy);
    Result<SessionOutcome> run_commit(std::optional<TimeToken> token = std::nullopt);
    // Launches the commit program from (possibly tampered) image bytes.
    Result<SessionOutcome> run_commit_with_image(Bytes image_bytes,
                                                 std::optional<TimeToken> token = std::nullopt);
    Result<SessionOutcome> run_delete_browser(std::vector<std::string> ui_input);
    Result<RecoveryView> recover() const;

    // Fires a pending schedule/manual trigger, if any, by running a commit.
    std::optional<Result<SessionOutcome>> pump(std::optional<TimeToken> token = std::nullopt);

    uint64_t protected_base() const { return cfg.unprotected_sectors; }
    uint64_t protected_sectors() const;
};

}  // namespace inuksuk
