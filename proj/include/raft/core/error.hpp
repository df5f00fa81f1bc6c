#pragma once

#include <stdexcept>
#include <string>

namespace raft {

enum class ErrorKind {
    invalid_input,
    validation,
    parse,
    io,
    capability,
    backend,
    detector,
    ranking,
    filtering,
    config,
    batch,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::validation: return "validation";
        case ErrorKind::parse: return "parse";
        case ErrorKind::io: return "io";
        case ErrorKind::capability: return "capability";
        case ErrorKind::backend: return "backend";
        case ErrorKind::detector: return "detector";
        case ErrorKind::ranking: return "ranking";
        case ErrorKind::filtering: return "filtering";
        case ErrorKind::config: return "config";
        case ErrorKind::batch: return "batch";
    }
    return "unknown";
}

/// All recoverable failures surface as raft::Error; the kind discriminates
/// user mistakes (invalid_input, validation, config) from runtime faults
/// (io, backend, detector).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace raft
