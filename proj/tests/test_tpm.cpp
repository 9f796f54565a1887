#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "inuksuk/crypto.hpp"
#include "inuksuk/rng.hpp"
#include "inuksuk/tpm.hpp"
#include "oracles.hpp"

using namespace inuksuk;

namespace {
Digest measurement(uint8_t fill) {
    Digest d{};
    d.fill(fill);
    return d;
}

Tpm make_tpm() { return Tpm(Bytes(32, 0x77)); }
}  // namespace

TEST_CASE("pcr extend from zeros matches the definition") {
    auto tpm = make_tpm();
    Digest m = measurement(0x01);
    auto v = tpm.pcr_extend(17, m);
    REQUIRE(v.ok());

    Bytes chained(32, 0);
    chained.insert(chained.end(), m.begin(), m.end());
    CHECK(v.value() == crypto::sha256(chained));
}

TEST_CASE("double extend matches the independent chain oracle") {
    auto tpm = make_tpm();
    Digest m1 = measurement(0x01), m2 = measurement(0x02);
    REQUIRE(tpm.pcr_extend(17, m1).ok());
    auto v = tpm.pcr_extend(17, m2);
    REQUIRE(v.ok());
    CHECK(v.value() == oracle::extend_chain({m1, m2}));
}

TEST_CASE("extend rejects out-of-range index") {
    auto tpm = make_tpm();
    auto r = tpm.pcr_extend(24, measurement(1));
    REQUIRE_FALSE(r.ok());
    CHECK(r.code() == Err::BadIndex);
}

TEST_CASE("extend is injective over a random corpus") {
    auto tpm = make_tpm();
    DetRng rng(3);
    std::set<Bytes> seen;
    for (int i = 0; i < 500; ++i) {
        Digest m{};
        rng.fill(m);
        auto v = tpm.pcr_extend(5, m);
        REQUIRE(v.ok());
        Bytes key(v.value().begin(), v.value().end());
        CHECK(seen.insert(key).second);  // no collision ever observed
    }
}

TEST_CASE("seal/unseal round trip and policy mismatch") {
    auto tpm = make_tpm();
    REQUIRE(tpm.pcr_extend(17, measurement(0xAB)).ok());
    std::vector<PcrBinding> binding{{17, tpm.pcr_value(17)}};
    DetRng rng(1);

    auto blob = tpm.seal(to_bytes("the-sed-credential"), binding, rng.bytes(24));
    REQUIRE(blob.ok());

    SUBCASE("unchanged pcr unseals") {
        auto p = tpm.unseal(blob.value());
        REQUIRE(p.ok());
        CHECK(to_string(p.value()) == "the-sed-credential");
    }
    SUBCASE("pcr drift fails with PolicyMismatch") {
        REQUIRE(tpm.pcr_extend(17, measurement(0xCD)).ok());
        auto p = tpm.unseal(blob.value());
        REQUIRE_FALSE(p.ok());
        CHECK(p.code() == Err::PolicyMismatch);
    }
    SUBCASE("ciphertext bit flip fails with CorruptBlob") {
        SealedBlob corrupted = blob.value();
        corrupted.boxed[corrupted.boxed.size() / 2] ^= 0x01;
        auto p = tpm.unseal(corrupted);
        REQUIRE_FALSE(p.ok());
        CHECK(p.code() == Err::CorruptBlob);
    }
    SUBCASE("serialization round trip") {
        auto back = SealedBlob::deserialize(blob.value().serialize());
        REQUIRE(back.ok());
        auto p = tpm.unseal(back.value());
        REQUIRE(p.ok());
        CHECK(to_string(p.value()) == "the-sed-credential");
    }
}

TEST_CASE("empty plaintext rejected") {
    auto tpm = make_tpm();
    DetRng rng(1);
    auto blob = tpm.seal(Bytes{}, {}, rng.bytes(24));
    CHECK_FALSE(blob.ok());
}

// Randomized trials: unseal success must equal the policy-satisfaction truth
// table, exhaustively evaluated per trial.
TEST_CASE("seal binding truth table over randomized trials") {
    DetRng rng(42);
    int divergence = 0;
    for (int trial = 0; trial < 100; ++trial) {
        Tpm tpm(rng.bytes(32));
        // random starting state
        for (int e = 0; e < int(rng.uniform(0, 3)); ++e)
            REQUIRE(tpm.pcr_extend(uint32_t(rng.uniform(16, 19)), measurement(uint8_t(rng.uniform(0, 255)))).ok());

        // bind 1..3 registers, sometimes to wrong expected values
        std::vector<PcrBinding> bindings;
        int nbind = int(rng.uniform(1, 3));
        for (int b = 0; b < nbind; ++b) {
            uint32_t idx = uint32_t(rng.uniform(16, 19));
            Digest expected = tpm.pcr_value(idx);
            if (rng.uniform(0, 4) == 0) expected[0] ^= 0xFF;  // wrong on purpose
            bindings.push_back({idx, expected});
        }
        auto blob = tpm.seal(rng.bytes(1 + rng.uniform(0, 64)), bindings, rng.bytes(24));
        REQUIRE(blob.ok());

        // optional drift after sealing
        if (rng.uniform(0, 1) == 0)
            REQUIRE(tpm.pcr_extend(uint32_t(rng.uniform(16, 19)), measurement(uint8_t(rng.uniform(0, 255)))).ok());

        bool expected_success = true;
        for (const auto& b : bindings)
            if (tpm.pcr_value(b.index) != b.expected) expected_success = false;

        bool actual = tpm.unseal(blob.value()).ok();
        if (actual != expected_success) ++divergence;
    }
    CHECK(divergence == 0);
}

TEST_CASE("nvram define/write/read with pcr policy") {
    auto tpm = make_tpm();
    REQUIRE(tpm.pcr_extend(17, measurement(0x10)).ok());
    std::vector<PcrBinding> policy{{17, tpm.pcr_value(17)}};

    auto undefined = tpm.nvram_read(0x1500);
    REQUIRE_FALSE(undefined.ok());
    CHECK(undefined.code() == Err::Undefined);

    REQUIRE(tpm.nvram_define(0x1500, policy).ok());
    REQUIRE(tpm.nvram_write(0x1500, to_bytes("blob")).ok());

    auto read = tpm.nvram_read(0x1500);
    REQUIRE(read.ok());
    CHECK(to_string(read.value()) == "blob");

    SUBCASE("pcr drift blocks the read") {
        REQUIRE(tpm.pcr_extend(17, measurement(0x22)).ok());
        auto blocked = tpm.nvram_read(0x1500);
        REQUIRE_FALSE(blocked.ok());
        CHECK(blocked.code() == Err::PolicyMismatch);
    }
    SUBCASE("nvram survives reboot, pcrs reset") {
        tpm.reset_on_boot();
        CHECK(tpm.pcr_value(17) == Digest{});
        auto blocked = tpm.nvram_read(0x1500);
        REQUIRE_FALSE(blocked.ok());  // boot-state pcrs do not satisfy the policy
        REQUIRE(tpm.pcr_extend(17, measurement(0x10)).ok());
        auto again = tpm.nvram_read(0x1500);
        REQUIRE(again.ok());
        CHECK(to_string(again.value()) == "blob");
    }
}

TEST_CASE("nvram read success is equivalent to policy satisfaction") {
    DetRng rng(8);
    for (int trial = 0; trial < 60; ++trial) {
        Tpm tpm(rng.bytes(32));
        uint32_t idx = uint32_t(rng.uniform(0, 23));
        Digest want = tpm.pcr_value(idx);
        if (rng.uniform(0, 1)) {
            REQUIRE(tpm.pcr_extend(idx, measurement(uint8_t(trial))).ok());
            if (rng.uniform(0, 1)) want = tpm.pcr_value(idx);  // sometimes track the change
        }
        REQUIRE(tpm.nvram_define(7, {{idx, want}}).ok());
        REQUIRE(tpm.nvram_write(7, to_bytes("x")).ok());
        bool satisfied = tpm.pcr_value(idx) == want;
        CHECK(tpm.nvram_read(7).ok() == satisfied);
    }
}

TEST_CASE("sealed blob unseals again after identical measurement replay") {
    auto tpm = make_tpm();
    Digest code = measurement(0x5A);
    REQUIRE(tpm.pcr_extend(17, code).ok());
    DetRng rng(2);
    auto blob = tpm.seal(to_bytes("secret"), {{17, tpm.pcr_value(17)}}, rng.bytes(24));
    REQUIRE(blob.ok());

    tpm.reset_on_boot();
    CHECK_FALSE(tpm.unseal(blob.value()).ok());
    REQUIRE(tpm.pcr_extend(17, code).ok());  // replay the same extend sequence
    auto p = tpm.unseal(blob.value());
    REQUIRE(p.ok());
    CHECK(to_string(p.value()) == "secret");
}
