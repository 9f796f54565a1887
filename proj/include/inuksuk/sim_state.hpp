#pragma once

#include <memory>
#include <string>

#include "inuksuk/result.hpp"
#include "inuksuk/sim_world.hpp"

namespace inuksuk {

// Simulator persistence: a canonical JSON document at `state_path` plus the
// raw sector image at `state_path + ".img"`. Save/load round-trips
// bit-exactly; everything else (PCR values, in-memory trace) is boot state.
Result<void> save_state(const SimWorld& world, const std::string& state_path);
Result<std::unique_ptr<SimWorld>> load_state(const std::string& state_path);

std::string state_image_path(const std::string& state_path);
std::string state_transcript_path(const std::string& state_path);

}  // namespace inuksuk
