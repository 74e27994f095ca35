#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace acpstep {

enum class ErrorCode {
    Syntax,
    Unsafe,
    Grounding,
    UnknownId,
    CapExceeded,
    SearchExhausted,
    NotApplicable,
    InvalidStep,
    NoAnswerSet,
    PreconditionViolated,
    CyclicGraph,
    Desynchronized,
    Schema,
    VersionMismatch,
};

// Machine-readable name, e.g. "cap-exhausted".
std::string_view to_string(ErrorCode code);

struct SourcePosition {
    int line = 0;
    int column = 0;
};

struct SourceSpan {
    std::string file;
    SourcePosition begin;
    SourcePosition end;

    std::string str() const;
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span = std::nullopt);

    ErrorCode code() const { return code_; }
    const std::optional<SourceSpan>& span() const { return span_; }

private:
    ErrorCode code_;
    std::optional<SourceSpan> span_;
};

} // namespace acpstep
