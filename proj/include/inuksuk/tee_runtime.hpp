#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "inuksuk/bytes.hpp"
#include "inuksuk/result.hpp"
#include "inuksuk/sed_device.hpp"
#include "inuksuk/tpm.hpp"
#include "inuksuk/trace.hpp"

namespace inuksuk {

class TeeSession;

// A measured program. The digest is recomputed from the image bytes at every
// launch, never cached, so byte tampering always shows up in the measurement.
struct ProgramImage {
    std::string name;
    Bytes image_bytes;
    std::function<Result<void>(TeeSession&)> entry;

    Digest code_digest() const;
};

struct SessionResult {
    uint64_t session_id = 0;
    Digest measured_digest{};
    uint64_t start_seq = 0;
    uint64_t end_seq = 0;
    uint64_t start_time = 0;
    uint64_t end_time = 0;
    Result<void> program_result;
};

// Exclusive device handles granted to a launched program. Unlocks are
// recorded so the runtime epilogue can force relocking even if the program
// faults before its own lock call.
class TeeSession {
public:
    TeeSession(SedDevice& sed, Tpm& tpm, UiChannel& ui, uint64_t now, uint64_t session_id)
        : sed_(sed), tpm_(tpm), ui_(ui), now_(now), session_id_(session_id) {}

    SedDevice& sed() { return sed_; }
    Tpm& tpm() { return tpm_; }
    UiChannel& ui() { return ui_; }
    uint64_t now() const { return now_; }
    uint64_t session_id() const { return session_id_; }

    Result<void> unlock_write(uint32_t range_id, std::span<const uint8_t> credential);
    Result<void> lock_write(uint32_t range_id, std::span<const uint8_t> credential);

private:
    friend class TeeRuntime;
    void relock_all();

    SedDevice& sed_;
    Tpm& tpm_;
    UiChannel& ui_;
    uint64_t now_;
    uint64_t session_id_;
    std::vector<std::pair<uint32_t, Bytes>> unlocked_;
};

// Late-launch environment: measures the image into the launch PCR, suspends
// the host world, runs the program with exclusive device access, re-locks and
// caps the measurement on exit.
class TeeRuntime {
public:
    TeeRuntime(SedDevice& sed, Tpm& tpm, SimClock& clock, Trace& trace, uint64_t transition_cost_s = 3);

    Result<SessionResult> late_launch(const ProgramImage& image, UiChannel& ui);

    bool session_active() const { return session_active_; }
    uint64_t transition_cost() const { return transition_cost_s_; }
    uint64_t launches() const { return launches_; }

    // Measurement the launch PCR holds while `image` runs.
    Digest session_pcr_value(const ProgramImage& image) const;

private:
    SedDevice& sed_;
    Tpm& tpm_;
    SimClock& clock_;
    Trace& trace_;
    uint64_t transition_cost_s_;
    bool session_active_ = false;
    uint64_t next_session_id_ = 1;
    uint64_t launches_ = 0;
};

}  // namespace inuksuk
