#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace inuksuk {

enum class Err {
    // sed_device
    BadCredential,
    OverlappingRange,
    OutOfBounds,
    NoSuchRange,
    WriteLocked,
    ReadLocked,
    BadPsid,
    // tpm
    BadIndex,
    PolicyMismatch,
    CorruptBlob,
    Undefined,
    // tee_runtime
    SessionActive,
    ProgramFault,
    WorldSuspended,
    // vault_fs
    TooSmall,
    Exists,
    NotFound,
    NoSpace,
    // trusted_updater
    AlreadyProvisioned,
    UnsealFailed,
    Aborted,
    Mismatch,
    // time_authority
    StaleToken,
    BadSignature,
    // cli / parsing
    BadArgument,
};

const char* err_name(Err e);

struct Error {
    Err code;
    std::string detail;
    // Carries the offending range_id for WriteLocked/ReadLocked, -1 otherwise.
    int64_t arg = -1;
};

inline Error error(Err code, std::string detail = {}, int64_t arg = -1) {
    return Error{code, std::move(detail), arg};
}

template <typename T>
class [[nodiscard]] Result {
public:
    Result(T value) : v_(std::move(value)) {}
    Result(Error e) : v_(std::move(e)) {}

    bool ok() const { return std::holds_alternative<T>(v_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& {
        if (!ok()) throw std::runtime_error(std::string("Result::value on error: ") + err_name(err().code));
        return std::get<T>(v_);
    }
    T& value() & {
        if (!ok()) throw std::runtime_error(std::string("Result::value on error: ") + err_name(err().code));
        return std::get<T>(v_);
    }
    T&& take() && {
        if (!ok()) throw std::runtime_error(std::string("Result::take on error: ") + err_name(err().code));
        return std::get<T>(std::move(v_));
    }
    const Error& err() const { return std::get<Error>(v_); }
    Err code() const { return err().code; }

private:
    std::variant<T, Error> v_;
};

struct Unit {};

template <>
class [[nodiscard]] Result<void> {
public:
    Result() : v_(Unit{}) {}
    Result(Error e) : v_(std::move(e)) {}

    bool ok() const { return std::holds_alternative<Unit>(v_); }
    explicit operator bool() const { return ok(); }
    const Error& err() const { return std::get<Error>(v_); }
    Err code() const { return err().code; }

private:
    std::variant<Unit, Error> v_;
};

}  // namespace inuksuk
