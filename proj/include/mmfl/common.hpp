#pragma once

#include <stdexcept>
#include <string>

namespace mmfl {

// Error taxonomy. The CLI maps these onto exit codes:
// ConfigError -> 1, DataError -> 2, everything else -> 3.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (files, labels, shapes of user data).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// API misuse: mismatched caches, length mismatches between paired arguments.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Violations of the aggregation protocol (e.g. aggregating an empty round).
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A broken internal invariant (non-finite values, impossible states).
struct InternalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModalityTag { A, B, AB };

inline const char* to_string(ModalityTag m) {
    switch (m) {
        case ModalityTag::A: return "A";
        case ModalityTag::B: return "B";
        case ModalityTag::AB: return "AB";
    }
    return "?";
}

inline ModalityTag modality_from_string(const std::string& s) {
    if (s == "A") return ModalityTag::A;
    if (s == "B") return ModalityTag::B;
    if (s == "AB") return ModalityTag::AB;
    throw ConfigError("unknown modality '" + s + "' (expected A, B, or AB)");
}

}  // namespace mmfl
