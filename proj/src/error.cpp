#include "certmono/error.hpp"

namespace certmono {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DivByIntervalContainingZero: return "DivByIntervalContainingZero";
    case ErrorKind::InverseOfZero: return "InverseOfZero";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::IsolationFailed: return "IsolationFailed";
    case ErrorKind::RefineStalled: return "RefineStalled";
    case ErrorKind::CertifyFailed: return "CertifyFailed";
    case ErrorKind::Stalled: return "Stalled";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::Cancelled: return "Cancelled";
    case ErrorKind::FiberCountMismatch: return "FiberCountMismatch";
    case ErrorKind::MatchFailed: return "MatchFailed";
    case ErrorKind::DegenerateLoop: return "DegenerateLoop";
    case ErrorKind::NotCoprime: return "NotCoprime";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvalidTriple: return "InvalidTriple";
    case ErrorKind::NetworkError: return "NetworkError";
    case ErrorKind::SchemaMapError: return "SchemaMapError";
    case ErrorKind::Precondition: return "Precondition";
    }
    return "Unknown";
}

} // namespace certmono
