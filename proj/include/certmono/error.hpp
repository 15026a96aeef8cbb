#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace certmono {

enum class ErrorKind {
    DivByIntervalContainingZero,
    InverseOfZero,
    NotInvertible,
    IsolationFailed,
    RefineStalled,
    CertifyFailed,
    Stalled,
    Diverged,
    Cancelled,
    FiberCountMismatch,
    MatchFailed,
    DegenerateLoop,
    NotCoprime,
    DegenerateModel,
    ParseError,
    InvalidTriple,
    NetworkError,
    SchemaMapError,
    Precondition,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::Precondition, what);
}

} // namespace certmono
