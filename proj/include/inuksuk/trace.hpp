#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace inuksuk {

// Simulated wall clock. Nothing in the project reads the host clock; time
// moves only through advance() calls from the harness or the TEE transition
// cost accounting.
struct SimClock {
    uint64_t now_s = 0;
    void advance(uint64_t seconds) { now_s += seconds; }
};

enum class TraceWorld { Host, Tee, Device, Harness };

const char* trace_world_name(TraceWorld w);

struct TraceEvent {
    uint64_t seq;        // total order over the whole simulation
    uint64_t sim_time;   // seconds at the time of the event
    TraceWorld world;
    std::string kind;    // e.g. "app_write", "session_start", "unlock_write"
    std::string detail;
};

// Append-only event log. The sequence number is the authoritative interleaving
// order; session windows are pairs of session_start/session_end events.
class Trace {
public:
    uint64_t append(uint64_t sim_time, TraceWorld world, std::string kind, std::string detail = {}) {
        uint64_t seq = next_seq_++;
        events_.push_back(TraceEvent{seq, sim_time, world, std::move(kind), std::move(detail)});
        return seq;
    }

    const std::vector<TraceEvent>& events() const { return events_; }
    void clear() { events_.clear(); }

private:
    std::vector<TraceEvent> events_;
    uint64_t next_seq_ = 1;
};

// Interactive text I/O for a TEE session. Input is scripted (or fed from the
// real terminal by the CLI); output is captured so tests and the forged-UI
// checks can inspect exactly what the user was shown.
struct UiChannel {
    std::vector<std::string> input;   // consumed front to back
    std::vector<std::string> output;

    size_t next_input = 0;

    bool has_input() const { return next_input < input.size(); }
    std::string read() { return has_input() ? input[next_input++] : std::string(); }
    void write(std::string line) { output.push_back(std::move(line)); }
};

}  // namespace inuksuk
