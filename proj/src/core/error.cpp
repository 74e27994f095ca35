#include <acpstep/caps.hpp>
#include <acpstep/error.hpp>

#include <cstdlib>
#include <string>

namespace acpstep {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Syntax: return "syntax-error";
    case ErrorCode::Unsafe: return "unsafe-variable";
    case ErrorCode::Grounding: return "grounding-error";
    case ErrorCode::UnknownId: return "unknown-id";
    case ErrorCode::CapExceeded: return "cap-exhausted";
    case ErrorCode::SearchExhausted: return "search-exhausted";
    case ErrorCode::NotApplicable: return "not-applicable";
    case ErrorCode::InvalidStep: return "invalid-step";
    case ErrorCode::NoAnswerSet: return "no-answer-set";
    case ErrorCode::PreconditionViolated: return "precondition-violated";
    case ErrorCode::CyclicGraph: return "cyclic-graph";
    case ErrorCode::Desynchronized: return "desynchronized";
    case ErrorCode::Schema: return "invalid-params";
    case ErrorCode::VersionMismatch: return "version-mismatch";
    }
    return "error";
}

std::string SourceSpan::str() const {
    std::string out = file.empty() ? std::string("<input>") : file;
    out += ':' + std::to_string(begin.line) + ':' + std::to_string(begin.column);
    return out;
}

Error::Error(ErrorCode code, const std::string& message, std::optional<SourceSpan> span)
    : std::runtime_error(span ? span->str() + ": " + message : message), code_(code), span_(std::move(span)) {}

namespace {

void read_cap(const char* name, std::size_t& target) {
    const char* value = std::getenv(name);
    if (value == nullptr || *value == '\0') {
        return;
    }
    char* end = nullptr;
    unsigned long long parsed = std::strtoull(value, &end, 10);
    if (end != nullptr && *end == '\0' && parsed > 0) {
        target = static_cast<std::size_t>(parsed);
    }
}

} // namespace

Caps Caps::from_environment() {
    Caps caps;
    read_cap("ACPSTEP_ATOM_CAP", caps.atoms);
    read_cap("ACPSTEP_UNFOUNDED_CAP", caps.unfounded);
    return caps;
}

} // namespace acpstep
