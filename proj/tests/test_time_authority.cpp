#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "inuksuk/time_authority.hpp"

using namespace inuksuk;

namespace {
TimeAuthority make_authority(uint8_t fill = 0x21) { return TimeAuthority(Bytes(32, fill)); }
}  // namespace

TEST_CASE("issued tokens verify under the matching public key") {
    auto auth = make_authority();
    DetRng rng(1);
    TimeToken t = auth.issue(1000, rng);
    auto v = verify_token(t, auth.public_key(), 0);
    REQUIRE(v.ok());
    CHECK(v.value() == 1000);
}

TEST_CASE("two issues with the same time differ in nonce") {
    auto auth = make_authority();
    DetRng rng(1);
    TimeToken a = auth.issue(500, rng);
    TimeToken b = auth.issue(500, rng);
    CHECK(a.nonce != b.nonce);
    CHECK(verify_token(a, auth.public_key(), 0).ok());
    CHECK(verify_token(b, auth.public_key(), 0).ok());
}

TEST_CASE("cross-key verification fails") {
    auto auth = make_authority(0x21);
    auto other = make_authority(0x22);
    DetRng rng(1);
    TimeToken t = auth.issue(1000, rng);
    auto v = verify_token(t, other.public_key(), 0);
    REQUIRE_FALSE(v.ok());
    CHECK(v.code() == Err::BadSignature);
}

TEST_CASE("any bit flip breaks verification") {
    auto auth = make_authority();
    DetRng rng(7);
    TimeToken t = auth.issue(123456, rng);

    SUBCASE("time") {
        t.time ^= 1;
        CHECK(verify_token(t, auth.public_key(), 0).code() == Err::BadSignature);
    }
    SUBCASE("nonce") {
        t.nonce[3] ^= 0x80;
        CHECK(verify_token(t, auth.public_key(), 0).code() == Err::BadSignature);
    }
    SUBCASE("signature") {
        t.signature[10] ^= 0x01;
        CHECK(verify_token(t, auth.public_key(), 0).code() == Err::BadSignature);
    }
}

TEST_CASE("strict monotonicity: replays and earlier times are stale") {
    auto auth = make_authority();
    DetRng rng(2);
    TimeToken first = auth.issue(2000, rng);
    auto v1 = verify_token(first, auth.public_key(), 0);
    REQUIRE(v1.ok());

    // replay of the accepted token
    auto replay = verify_token(first, auth.public_key(), v1.value());
    REQUIRE_FALSE(replay.ok());
    CHECK(replay.code() == Err::StaleToken);

    // earlier-but-valid token
    TimeToken earlier = auth.issue(1500, rng);
    auto v2 = verify_token(earlier, auth.public_key(), v1.value());
    REQUIRE_FALSE(v2.ok());
    CHECK(v2.code() == Err::StaleToken);

    // equal time is also a replay
    TimeToken equal = auth.issue(2000, rng);
    CHECK(verify_token(equal, auth.public_key(), v1.value()).code() == Err::StaleToken);
}

TEST_CASE("shuffled token stream accepts exactly the strictly-increasing subsequence") {
    auto auth = make_authority();
    DetRng rng(11);
    std::vector<TimeToken> tokens;
    for (int i = 0; i < 100; ++i) tokens.push_back(auth.issue(rng.uniform(1, 5000), rng));

    uint64_t last = 0;
    std::vector<size_t> accepted_by_verify, accepted_by_model;
    uint64_t model_last = 0;
    for (size_t i = 0; i < tokens.size(); ++i) {
        auto v = verify_token(tokens[i], auth.public_key(), last);
        if (v.ok()) {
            last = v.value();
            accepted_by_verify.push_back(i);
        }
        if (tokens[i].time > model_last) {  // reference: greedy increasing subsequence
            model_last = tokens[i].time;
            accepted_by_model.push_back(i);
        }
    }
    CHECK(accepted_by_verify == accepted_by_model);

    // accepted times strictly increase
    uint64_t prev = 0;
    for (size_t i : accepted_by_verify) {
        CHECK(tokens[i].time > prev);
        prev = tokens[i].time;
    }
}

TEST_CASE("binary and hex wire formats round trip") {
    auto auth = make_authority();
    DetRng rng(3);
    TimeToken t = auth.issue(0xDEADBEEF, rng);

    Bytes wire = t.serialize();
    CHECK(wire.size() == 8 + 16 + 64);
    // fixed-order fields: 8-byte big-endian time first
    CHECK(get_u64be(std::span(wire).subspan(0, 8)) == 0xDEADBEEF);

    auto back = TimeToken::deserialize(wire);
    REQUIRE(back.ok());
    CHECK(back.value().time == t.time);
    CHECK(back.value().nonce == t.nonce);
    CHECK(verify_token(back.value(), auth.public_key(), 0).ok());

    auto hex_back = TimeToken::from_hex(t.to_hex());
    REQUIRE(hex_back.ok());
    CHECK(hex_back.value().signature == t.signature);

    CHECK_FALSE(TimeToken::from_hex("zz").ok());
    CHECK_FALSE(TimeToken::deserialize(Bytes(10, 0)).ok());
}
