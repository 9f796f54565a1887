#include "inuksuk/tee_runtime.hpp"

#include <stdexcept>

#include "inuksuk/crypto.hpp"

namespace inuksuk {

Digest ProgramImage::code_digest() const { return crypto::sha256(image_bytes); }

Result<void> TeeSession::unlock_write(uint32_t range_id, std::span<const uint8_t> credential) {
    auto r = sed_.unlock_write(range_id, credential);
    if (r.ok()) unlocked_.emplace_back(range_id, Bytes(credential.begin(), credential.end()));
    return r;
}

Result<void> TeeSession::lock_write(uint32_t range_id, std::span<const uint8_t> credential) {
    auto r = sed_.lock_write(range_id, credential);
    if (r.ok()) {
        std::erase_if(unlocked_, [&](const auto& p) { return p.first == range_id; });
    }
    return r;
}

void TeeSession::relock_all() {
    for (const auto& [range_id, cred] : unlocked_) {
        (void)sed_.lock_write(range_id, cred);
    }
    unlocked_.clear();
}

TeeRuntime::TeeRuntime(SedDevice& sed, Tpm& tpm, SimClock& clock, Trace& trace, uint64_t transition_cost_s)
    : sed_(sed), tpm_(tpm), clock_(clock), trace_(trace), transition_cost_s_(transition_cost_s) {
    if (transition_cost_s_ < 2 || transition_cost_s_ > 4)
        throw std::invalid_argument("transition cost must be 2..4 simulated seconds");
}

Digest TeeRuntime::session_pcr_value(const ProgramImage& image) const {
    // reset-then-extend: H(0^32 || code_digest), independent of prior boot state
    Bytes chained(32, 0);
    Digest code = image.code_digest();
    chained.insert(chained.end(), code.begin(), code.end());
    return crypto::sha256(chained);
}

Result<SessionResult> TeeRuntime::late_launch(const ProgramImage& image, UiChannel& ui) {
    if (session_active_) return error(Err::SessionActive, "a session is already running");

    // World switch cost (screen mode switch etc.) charged to the timeline.
    clock_.advance(transition_cost_s_);
    ++launches_;

    SessionResult result;
    result.session_id = next_session_id_++;
    result.start_time = clock_.now_s;

    Digest code = image.code_digest();
    (void)tpm_.pcr_reset(kLaunchPcr);
    auto extended = tpm_.pcr_extend(kLaunchPcr, code);
    result.measured_digest = extended.value();

    session_active_ = true;
    result.start_seq = trace_.append(clock_.now_s, TraceWorld::Tee, "session_start",
                                     image.name + " pcr17=" + hex_encode(result.measured_digest));

    TeeSession session(sed_, tpm_, ui, clock_.now_s, result.session_id);
    try {
        result.program_result = image.entry ? image.entry(session) : Result<void>{};
    } catch (const std::exception& e) {
        result.program_result = error(Err::ProgramFault, e.what());
    }
    if (!result.program_result.ok() && result.program_result.code() != Err::ProgramFault) {
        // Program surfaced an error; epilogue still runs, caller sees the cause.
        trace_.append(clock_.now_s, TraceWorld::Tee, "program_error",
                      err_name(result.program_result.code()));
    }

    // Enforced epilogue: relock everything the program unlocked, then cap the
    // launch PCR so sealed secrets are out of reach until the next launch.
    session.relock_all();
    (void)tpm_.pcr_extend(kLaunchPcr, crypto::sha256(to_bytes("inuksuk.session.exit")));

    result.end_seq = trace_.append(clock_.now_s, TraceWorld::Tee, "session_end", image.name);
    result.end_time = clock_.now_s;
    session_active_ = false;
    return result;
}

}  // namespace inuksuk
