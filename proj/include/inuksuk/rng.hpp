#pragma once

#include <cstdint>
#include <random>

#include "inuksuk/bytes.hpp"

namespace inuksuk {

// Seeded deterministic byte source. Every random value in the simulation
// (credentials, nonces, workload content) comes from one of these so a run
// is reproducible from the recorded seed.
class DetRng {
public:
    explicit DetRng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    uint64_t uniform(uint64_t lo, uint64_t hi) {  // inclusive bounds
        return lo + next_u64() % (hi - lo + 1);
    }

    Bytes bytes(size_t n) {
        Bytes out(n);
        fill(out);
        return out;
    }

    void fill(std::span<uint8_t> out) {
        size_t i = 0;
        while (i < out.size()) {
            uint64_t v = next_u64();
            for (int k = 0; k < 8 && i < out.size(); ++k, ++i) out[i] = uint8_t(v >> (8 * k));
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace inuksuk
