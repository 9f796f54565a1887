#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "inuksuk/crypto.hpp"
#include "inuksuk/sim_world.hpp"

using namespace inuksuk;

namespace {

WorldConfig small_config(uint64_t seed = 3) {
    WorldConfig cfg;
    cfg.seed = seed;
    cfg.fs_clusters = 512;
    cfg.fs_dir_capacity = 256;
    return cfg;
}

UpdatePolicy policy_8h() {
    UpdatePolicy p;
    p.avatar = "quiet-harbor-19";
    p.commit_interval = 8 * 3600;
    return p;
}

}  // namespace

TEST_CASE("app writes mutate originals and echo back") {
    SimWorld w(small_config());
    REQUIRE(w.host.app_write("notes.txt", to_bytes("draft one"), 100).ok());
    CHECK(to_string(w.host.files().at("notes.txt").content) == "draft one");
    CHECK(w.host.files().at("notes.txt").modified == 100);
    CHECK(w.host.files().at("notes.txt").mods_since_commit == 1);

    REQUIRE(w.host.app_write("notes.txt", to_bytes("draft two"), 200).ok());
    CHECK(to_string(w.host.files().at("notes.txt").content) == "draft two");
    CHECK(w.host.files().at("notes.txt").mods_since_commit == 2);
}

TEST_CASE("writes during an active session are rejected with WorldSuspended") {
    SimWorld w(small_config());
    Result<void> attempt = {};
    ProgramImage img{"p", to_bytes("code"), [&](TeeSession&) -> Result<void> {
                         attempt = w.host.app_write("x", Bytes{1}, w.clock.now_s);
                         return {};
                     }};
    UiChannel ui;
    REQUIRE(w.tee.late_launch(img, ui).ok());
    REQUIRE_FALSE(attempt.ok());
    CHECK(attempt.code() == Err::WorldSuspended);
    CHECK(w.host.files().count("x") == 0);

    // no host event between the session bracket in the trace
    uint64_t start = 0, end = 0;
    for (const auto& e : w.trace.events()) {
        if (e.kind == "session_start") start = e.seq;
        if (e.kind == "session_end") end = e.seq;
    }
    for (const auto& e : w.trace.events())
        if (e.world == TraceWorld::Host) CHECK((e.seq < start || e.seq > end));
}

TEST_CASE("storm leaves one state and bumps the mod count") {
    SimWorld w(small_config());
    REQUIRE(w.host.app_autosave_storm("doc", 100, to_bytes("final"), 50).ok());
    CHECK(to_string(w.host.files().at("doc").content) == "final");
    CHECK(w.host.files().at("doc").mods_since_commit == 100);
}

TEST_CASE("storm then commit produces exactly one new version") {
    SimWorld w(small_config());
    w.clock.advance(1000);
    REQUIRE(w.host.app_write("doc", to_bytes("v0"), w.clock.now_s).ok());
    REQUIRE(w.provision(policy_8h()).ok());

    w.clock.advance(100);
    REQUIRE(w.host.app_autosave_storm("doc", 100, to_bytes("v1-final"), w.clock.now_s).ok());
    w.clock.advance(10);
    auto out = w.run_commit();
    REQUIRE(out.ok());
    REQUIRE(out.value().report);
    CHECK(out.value().report->committed.size() == 1);

    auto view = w.recover();
    size_t hidden = 0;
    for (const auto& e : view.value().list(true)) hidden += e.hidden;
    CHECK(hidden == 1);
    CHECK(to_string(view.value().read_file("doc").value()) == "v1-final");
}

TEST_CASE("schedule fires at interval boundaries and advances") {
    SimWorld w(small_config());
    w.host.schedule().interval = 8 * 3600;
    w.host.schedule().next_fire = 8 * 3600;

    CHECK_FALSE(w.host.tick(100).has_value());
    CHECK_FALSE(w.host.tick(8 * 3600 - 1).has_value());
    auto first = w.host.tick(8 * 3600);
    REQUIRE(first.has_value());
    CHECK_FALSE(first->manual);
    CHECK(w.host.schedule().next_fire == 16 * 3600);
    auto second = w.host.tick(16 * 3600 + 5);
    REQUIRE(second.has_value());
    CHECK(w.host.schedule().next_fire == 24 * 3600);
}

TEST_CASE("manual trigger fires exactly once") {
    SimWorld w(small_config());
    w.host.trigger_manual();
    REQUIRE(w.host.tick(10).has_value());
    CHECK(w.host.tick(11).has_value() == false);
}

TEST_CASE("killed driver stops triggering") {
    SimWorld w(small_config());
    w.host.schedule().next_fire = 100;
    w.host.kill_driver();
    CHECK_FALSE(w.host.tick(200).has_value());
}

TEST_CASE("triggers defer while a session is active") {
    SimWorld w(small_config());
    w.host.schedule().next_fire = 1;
    std::optional<CommitTrigger> inside;
    ProgramImage img{"p", to_bytes("code"), [&](TeeSession&) -> Result<void> {
                         inside = w.host.tick(w.clock.now_s + 100);
                         return {};
                     }};
    UiChannel ui;
    REQUIRE(w.tee.late_launch(img, ui).ok());
    CHECK_FALSE(inside.has_value());
    CHECK(w.host.tick(w.clock.now_s + 100).has_value());  // fires after the session
}

TEST_CASE("recovery mount works with zero credentials after an OS wipe") {
    SimWorld w(small_config());
    w.clock.advance(1000);
    Bytes payload = w.rng.bytes(30000);
    REQUIRE(w.host.app_write("precious.jpg", payload, w.clock.now_s).ok());
    REQUIRE(w.provision(policy_8h()).ok());

    // wipe the OS: zero the unprotected region, drop all host state
    Bytes zeros(size_t(w.cfg.unprotected_sectors) * kSectorSize, 0);
    REQUIRE(w.sed.write_sectors(0, zeros).ok());
    w.host.wipe();

    auto view = w.recover();
    REQUIRE(view.ok());
    auto entries = view.value().list(true);
    REQUIRE(entries.size() == 1);
    CHECK(entries[0].name == "precious.jpg");
    CHECK(view.value().read_file("precious.jpg").value() == payload);

    // the range is still write-locked after mounting
    CHECK(w.sed.find_range(w.env.protected_range_id)->write_locked);
    Digest before = w.sed.store_digest();
    (void)view.value().list(true);
    (void)view.value().read_file("precious.jpg");
    CHECK(w.sed.store_digest() == before);  // mounting and reading never mutate
}

TEST_CASE("host can always read the protected partition but never write while locked") {
    SimWorld w(small_config());
    w.clock.advance(500);
    REQUIRE(w.host.app_write("a", Bytes(4000, 1), w.clock.now_s).ok());
    REQUIRE(w.provision(policy_8h()).ok());

    auto read = w.sed.read_sectors(w.env.protected_base_lba, 8);
    CHECK(read.ok());
    auto write = w.sed.write_sectors(w.env.protected_base_lba, Bytes(kSectorSize, 0xFF));
    REQUIRE_FALSE(write.ok());
    CHECK(write.code() == Err::WriteLocked);
}
