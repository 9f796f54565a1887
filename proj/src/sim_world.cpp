#include "inuksuk/sim_world.hpp"

#include "inuksuk/crypto.hpp"

namespace inuksuk {

uint64_t SimWorld::protected_sectors() const {
    return vault_region_sectors(cfg.fs_clusters, cfg.fs_cluster_size, cfg.fs_dir_capacity);
}

namespace {
Bytes derive(DetRng& rng, size_t n) { return rng.bytes(n); }

Bytes authority_seed(uint64_t seed) {
    Bytes tag = to_bytes("inuksuk.time-authority." + std::to_string(seed));
    Digest d = crypto::sha256(tag);
    return Bytes(d.begin(), d.end());
}
}  // namespace

SimWorld::SimWorld(WorldConfig config)
    : cfg(config),
      rng(config.seed),
      psid(derive(rng, 32)),
      admin_credential(derive(rng, 32)),
      sed(config.unprotected_sectors +
              vault_region_sectors(config.fs_clusters, config.fs_cluster_size, config.fs_dir_capacity),
          psid, admin_credential),
      tpm(derive(rng, 32)),
      tee(sed, tpm, clock, trace, config.transition_cost_s),
      host(tee, trace, clock),
      authority(authority_seed(config.seed)) {
    env.protected_base_lba = protected_base();
    env.protected_length = protected_sectors();
    env.fs_clusters = cfg.fs_clusters;
    env.fs_cluster_size = cfg.fs_cluster_size;
    env.fs_dir_capacity = cfg.fs_dir_capacity;
}

Bytes SimWorld::genuine_updater_bytes() {
    // Stand-in for the PAL binary; only its measurement matters here.
    std::string blob = "INUKSUK-TRUSTED-UPDATER image v1\n";
    for (int i = 0; i < 64; ++i) blob += "section " + std::to_string(i) + ": code bytes\n";
    return to_bytes(blob);
}

ProgramImage SimWorld::updater_image(Bytes image_bytes,
                                     std::function<Result<void>(TeeSession&)> entry) const {
    return ProgramImage{"trusted_updater", std::move(image_bytes), std::move(entry)};
}

Result<SessionOutcome> SimWorld::provision(UpdatePolicy policy) {
    if (provisioned) return error(Err::AlreadyProvisioned, "world already provisioned");

    auto selection = host.listing();
    std::optional<updater::ProvisionResult> provision_out;
    Result<void> inner_err;

    ProgramImage image = updater_image(genuine_updater_bytes(), [&](TeeSession& session) -> Result<void> {
        auto r = updater::provision(session, env, selection, policy, admin_credential,
                                    authority.public_key(), session.now(), rng);
        if (!r.ok()) return r.err();
        provision_out = std::move(r).take();
        return {};
    });

    UiChannel ui;
    auto launched = tee.late_launch(image, ui);
    if (!launched.ok()) return launched.err();

    SessionOutcome outcome;
    outcome.session = std::move(launched).take();
    outcome.ui_output = ui.output;
    if (provision_out) {
        host.plaintext_policy = provision_out->plaintext_policy;
        host.schedule().interval = policy.commit_interval;
        host.schedule().next_fire = clock.now_s + policy.commit_interval;
        host.reset_mod_counts();
        provisioned = true;
        outcome.report = std::move(provision_out->report);
    }
    return outcome;
}

Result<SessionOutcome> SimWorld::run_commit_with_image(Bytes image_bytes, std::optional<TimeToken> token) {
    auto listing = host.listing();
    std::optional<UpdateReport> report;

    ProgramImage image = updater_image(std::move(image_bytes), [&](TeeSession& session) -> Result<void> {
        auto r = updater::run_commit_session(session, env, listing, host.plaintext_policy, token, rng, &trace);
        if (!r.ok()) return r.err();
        report = std::move(r).take().report;
        return {};
    });

    UiChannel ui;
    auto launched = tee.late_launch(image, ui);
    if (!launched.ok()) return launched.err();

    SessionOutcome outcome;
    outcome.session = std::move(launched).take();
    outcome.ui_output = ui.output;
    if (report) {
        host.reset_mod_counts();
        outcome.report = std::move(report);
    }
    return outcome;
}

Result<SessionOutcome> SimWorld::run_commit(std::optional<TimeToken> token) {
    return run_commit_with_image(genuine_updater_bytes(), std::move(token));
}

Result<SessionOutcome> SimWorld::run_delete_browser(std::vector<std::string> ui_input) {
    std::optional<UpdateReport> report;
    ProgramImage image = updater_image(genuine_updater_bytes(), [&](TeeSession& session) -> Result<void> {
        auto r = updater::run_delete_session(session, env, rng, &trace);
        if (!r.ok()) return r.err();
        report = std::move(r).take().report;
        return {};
    });

    UiChannel ui;
    ui.input = std::move(ui_input);
    auto launched = tee.late_launch(image, ui);
    if (!launched.ok()) return launched.err();

    SessionOutcome outcome;
    outcome.session = std::move(launched).take();
    outcome.ui_output = ui.output;
    outcome.report = std::move(report);
    return outcome;
}

Result<RecoveryView> SimWorld::recover() const {
    return RecoveryView::mount(sed, env.protected_base_lba, env.protected_length);
}

std::optional<Result<SessionOutcome>> SimWorld::pump(std::optional<TimeToken> token) {
    auto trigger = host.tick(clock.now_s);
    if (!trigger) return std::nullopt;
    return run_commit(std::move(token));
}

}  // namespace inuksuk
