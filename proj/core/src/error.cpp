#include "fpme/error.hpp"

namespace fpme {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidDomain: return "invalid-domain";
        case ErrorKind::InvalidArgument: return "invalid-argument";
        case ErrorKind::GridMismatch: return "grid-mismatch";
        case ErrorKind::ParamsMismatch: return "params-mismatch";
        case ErrorKind::DomainBoundary: return "domain-boundary";
        case ErrorKind::AssemblyFailure: return "assembly-failure";
        case ErrorKind::NoConvergence: return "no-convergence";
        case ErrorKind::StepTooLarge: return "step-too-large";
        case ErrorKind::InnerNoConvergence: return "inner-no-convergence";
        case ErrorKind::InvalidLedger: return "invalid-ledger";
        case ErrorKind::NonpositiveTime: return "nonpositive-time";
        case ErrorKind::Negativity: return "negativity";
        case ErrorKind::MissingFile: return "missing-file";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

}  // namespace fpme
