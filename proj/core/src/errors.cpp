#include "dris/errors.hpp"

namespace dris {

std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedDomain: return "malformed_domain";
        case ErrorCode::WrongOwner: return "wrong_owner";
        case ErrorCode::CapacityExceeded: return "capacity_exceeded";
        case ErrorCode::UnknownDoc: return "unknown_doc";
        case ErrorCode::UncompressibleRecord: return "uncompressible_record";
        case ErrorCode::StaleToken: return "stale_token";
        case ErrorCode::ChildUnreachable: return "child_unreachable";
        case ErrorCode::StaleDescription: return "stale_description";
        case ErrorCode::EmptyRegistry: return "empty_registry";
        case ErrorCode::PayloadTooLarge: return "payload_too_large";
        case ErrorCode::MalformedMessage: return "malformed_message";
        case ErrorCode::UnknownType: return "unknown_type";
        case ErrorCode::NonCanonical: return "non_canonical";
        case ErrorCode::UnsupportedVersion: return "unsupported_version";
        case ErrorCode::OrphanDomain: return "orphan_domain";
        case ErrorCode::DuplicateDomain: return "duplicate_domain";
        case ErrorCode::RoleMismatch: return "role_mismatch";
        case ErrorCode::UnknownRecipient: return "unknown_recipient";
        case ErrorCode::UnknownOwner: return "unknown_owner";
        case ErrorCode::InvalidArgument: return "invalid_argument";
        case ErrorCode::IoError: return "io_error";
    }
    return "unknown";
}

std::optional<ErrorCode> error_code_from_name(std::string_view name) {
    static constexpr ErrorCode all[] = {
        ErrorCode::MalformedDomain,   ErrorCode::WrongOwner,       ErrorCode::CapacityExceeded,
        ErrorCode::UnknownDoc,        ErrorCode::UncompressibleRecord,
        ErrorCode::StaleToken,        ErrorCode::ChildUnreachable, ErrorCode::StaleDescription,
        ErrorCode::EmptyRegistry,     ErrorCode::PayloadTooLarge,  ErrorCode::MalformedMessage,
        ErrorCode::UnknownType,       ErrorCode::NonCanonical,     ErrorCode::UnsupportedVersion,
        ErrorCode::OrphanDomain,      ErrorCode::DuplicateDomain,  ErrorCode::RoleMismatch,
        ErrorCode::UnknownRecipient,  ErrorCode::UnknownOwner,     ErrorCode::InvalidArgument,
        ErrorCode::IoError,
    };
    for (ErrorCode c : all)
        if (error_code_name(c) == name) return c;
    return std::nullopt;
}

}  // namespace dris
