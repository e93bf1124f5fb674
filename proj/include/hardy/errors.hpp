#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

// Coarse failure categories; the CLI maps them onto process exit codes.
enum class ErrorKind {
    resolution_exceeded,   // level/resolution above the configured ceiling
    dimension_mismatch,    // incompatible resolutions or matrix shapes
    disjointness,          // overlapping intervals where disjoint ones are required
    incomplete_family,     // collection family not total on its domain
    degenerate_diagonal,   // zero diagonal entry where a sign is needed
    enumeration_cap,       // exhaustive sign enumeration support too large
    generation_infeasible, // requested test operator cannot exist
    signs_not_found,       // sign search exhausted its attempt budget
    factorization_infeasible, // singular block system, pipeline cannot proceed
    verification_failed,   // a checked identity/bound does not hold
    config,                // malformed configuration or input file
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::resolution_exceeded: return "resolution-exceeded";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::disjointness: return "disjointness";
        case ErrorKind::incomplete_family: return "incomplete-family";
        case ErrorKind::degenerate_diagonal: return "degenerate-diagonal";
        case ErrorKind::enumeration_cap: return "enumeration-cap";
        case ErrorKind::generation_infeasible: return "generation-infeasible";
        case ErrorKind::signs_not_found: return "signs-not-found";
        case ErrorKind::factorization_infeasible: return "factorization-infeasible";
        case ErrorKind::verification_failed: return "verification-failed";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

} // namespace hardy
