#include "inuksuk/result.hpp"
#include "inuksuk/trace.hpp"

namespace inuksuk {

const char* err_name(Err e) {
    switch (e) {
        case Err::BadCredential: return "BadCredential";
        case Err::OverlappingRange: return "OverlappingRange";
        case Err::OutOfBounds: return "OutOfBounds";
        case Err::NoSuchRange: return "NoSuchRange";
        case Err::WriteLocked: return "WriteLocked";
        case Err::ReadLocked: return "ReadLocked";
        case Err::BadPsid: return "BadPsid";
        case Err::BadIndex: return "BadIndex";
        case Err::PolicyMismatch: return "PolicyMismatch";
        case Err::CorruptBlob: return "CorruptBlob";
        case Err::Undefined: return "Undefined";
        case Err::SessionActive: return "SessionActive";
        case Err::ProgramFault: return "ProgramFault";
        case Err::WorldSuspended: return "WorldSuspended";
        case Err::TooSmall: return "TooSmall";
        case Err::Exists: return "Exists";
        case Err::NotFound: return "NotFound";
        case Err::NoSpace: return "NoSpace";
        case Err::AlreadyProvisioned: return "AlreadyProvisioned";
        case Err::UnsealFailed: return "UnsealFailed";
        case Err::Aborted: return "Aborted";
        case Err::Mismatch: return "Mismatch";
        case Err::StaleToken: return "StaleToken";
        case Err::BadSignature: return "BadSignature";
        case Err::BadArgument: return "BadArgument";
    }
    return "Unknown";
}

const char* trace_world_name(TraceWorld w) {
    switch (w) {
        case TraceWorld::Host: return "host";
        case TraceWorld::Tee: return "tee";
        case TraceWorld::Device: return "device";
        case TraceWorld::Harness: return "harness";
    }
    return "?";
}

}  // namespace inuksuk
