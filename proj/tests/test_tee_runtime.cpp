#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "inuksuk/crypto.hpp"
#include "inuksuk/tee_runtime.hpp"
#include "oracles.hpp"

using namespace inuksuk;

namespace {

struct Rig {
    SimClock clock;
    Trace trace;
    SedDevice sed{2048, to_bytes("psid"), Bytes(32, 0xAA)};
    Tpm tpm{Bytes(32, 0x01)};
    TeeRuntime tee{sed, tpm, clock, trace, 3};
};

ProgramImage image_of(std::string name, std::string bytes, std::function<Result<void>(TeeSession&)> entry) {
    return ProgramImage{std::move(name), to_bytes(bytes), std::move(entry)};
}

}  // namespace

TEST_CASE("launch measures the image into the launch pcr, reset-then-extend") {
    Rig rig;
    // dirty the register first; a dynamic launch must not depend on it
    REQUIRE(rig.tpm.pcr_extend(kLaunchPcr, Digest{}).ok());

    auto img = image_of("prog", "code-v1", [](TeeSession&) -> Result<void> { return {}; });
    Digest expected = oracle::extend_chain({crypto::sha256(to_bytes("code-v1"))});

    UiChannel ui;
    auto r = rig.tee.late_launch(img, ui);
    REQUIRE(r.ok());
    CHECK(r.value().measured_digest == expected);
    CHECK(r.value().program_result.ok());
}

TEST_CASE("identical image bytes measure identically across reboots") {
    Rig rig;
    auto img = image_of("prog", "stable-bytes", [](TeeSession&) -> Result<void> { return {}; });
    UiChannel ui1, ui2;
    auto a = rig.tee.late_launch(img, ui1);
    rig.tpm.reset_on_boot();
    auto b = rig.tee.late_launch(img, ui2);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.value().measured_digest == b.value().measured_digest);
}

TEST_CASE("tampered bytes measure differently") {
    Rig rig;
    UiChannel ui1, ui2;
    auto a = rig.tee.late_launch(image_of("p", "AAAA", nullptr), ui1);
    auto b = rig.tee.late_launch(image_of("p", "AAAB", nullptr), ui2);
    CHECK(a.value().measured_digest != b.value().measured_digest);
}

TEST_CASE("transition cost charged per launch") {
    Rig rig;
    CHECK(rig.tee.transition_cost() == 3);
    UiChannel ui;
    uint64_t t0 = rig.clock.now_s;
    for (int i = 0; i < 10; ++i) {
        UiChannel u;
        REQUIRE(rig.tee.late_launch(image_of("p", "x", nullptr), u).ok());
    }
    CHECK(rig.clock.now_s - t0 == 10 * 3);

    SedDevice sed2(64, to_bytes("p"), Bytes(32, 0));
    Tpm tpm2{Bytes(32, 0)};
    SimClock clk2;
    Trace tr2;
    TeeRuntime two(sed2, tpm2, clk2, tr2, 2);
    UiChannel u2;
    REQUIRE(two.late_launch(image_of("p", "x", nullptr), u2).ok());
    CHECK(clk2.now_s == 2);

    CHECK_THROWS(TeeRuntime(sed2, tpm2, clk2, tr2, 5));  // outside the 2..4s envelope
}

TEST_CASE("nested launch rejected with SessionActive") {
    Rig rig;
    UiChannel outer_ui;
    Result<void> inner_result = {};
    auto img = image_of("outer", "code", [&](TeeSession&) -> Result<void> {
        UiChannel inner_ui;
        auto inner = rig.tee.late_launch(image_of("inner", "code", nullptr), inner_ui);
        inner_result = inner.ok() ? Result<void>{} : Result<void>{inner.err()};
        return {};
    });
    REQUIRE(rig.tee.late_launch(img, outer_ui).ok());
    REQUIRE_FALSE(inner_result.ok());
    CHECK(inner_result.code() == Err::SessionActive);
}

TEST_CASE("epilogue relocks even when the program faults") {
    Rig rig;
    Bytes cred(32, 0x11);
    auto id = rig.sed.configure_range(Bytes(32, 0xAA), 100, 100, true, false, cred).value();

    auto img = image_of("p", "code", [&](TeeSession& s) -> Result<void> {
        auto u = s.unlock_write(id, cred);
        REQUIRE(u.ok());
        REQUIRE(s.sed().write_sectors(100, Bytes(kSectorSize, 1)).ok());
        throw std::runtime_error("mid-copy crash");
    });
    UiChannel ui;
    auto r = rig.tee.late_launch(img, ui);
    REQUIRE(r.ok());
    CHECK(r.value().program_result.code() == Err::ProgramFault);
    CHECK(rig.sed.find_range(id)->write_locked);  // fail-closed
}

TEST_CASE("launch pcr is capped after the session ends") {
    Rig rig;
    Digest in_session{};
    auto img = image_of("p", "code", [&](TeeSession& s) -> Result<void> {
        in_session = s.tpm().pcr_value(kLaunchPcr);
        return {};
    });
    UiChannel ui;
    REQUIRE(rig.tee.late_launch(img, ui).ok());
    CHECK(rig.tpm.pcr_value(kLaunchPcr) != in_session);  // secrets sealed to the session value are out of reach
}

TEST_CASE("session start/end events bracket tee activity in the trace") {
    Rig rig;
    UiChannel ui;
    auto img = image_of("p", "code", [&](TeeSession& s) -> Result<void> {
        s.ui().write("hello");
        return {};
    });
    auto r = rig.tee.late_launch(img, ui);
    REQUIRE(r.ok());
    CHECK(r.value().start_seq < r.value().end_seq);
    CHECK(ui.output == std::vector<std::string>{"hello"});

    bool saw_start = false, saw_end = false;
    for (const auto& e : rig.trace.events()) {
        if (e.kind == "session_start") saw_start = true;
        if (e.kind == "session_end") saw_end = true;
    }
    CHECK(saw_start);
    CHECK(saw_end);
}
