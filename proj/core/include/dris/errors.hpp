#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dris {

enum class ErrorCode {
    MalformedDomain,
    WrongOwner,
    CapacityExceeded,
    UnknownDoc,
    UncompressibleRecord,
    StaleToken,
    ChildUnreachable,
    StaleDescription,
    EmptyRegistry,
    PayloadTooLarge,
    MalformedMessage,
    UnknownType,
    NonCanonical,
    UnsupportedVersion,
    OrphanDomain,
    DuplicateDomain,
    RoleMismatch,
    UnknownRecipient,
    UnknownOwner,
    InvalidArgument,
    IoError,
};

std::string_view error_code_name(ErrorCode code);

// Inverse of error_code_name; nullopt for unrecognized names (wire error
// payloads carry codes from possibly-foreign implementations).
std::optional<ErrorCode> error_code_from_name(std::string_view name);

// Single exception type across the library; call sites branch on code().
class DrisError : public std::runtime_error {
public:
    DrisError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& message) {
    throw DrisError(code, message);
}

}  // namespace dris
