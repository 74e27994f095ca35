#pragma once

#include <acpstep/caps.hpp>
#include <acpstep/error.hpp>
#include <acpstep/frontend/grounder.hpp>
#include <acpstep/stepping/tree.hpp>

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace acpstep {

using nlohmann::json;

inline constexpr const char* session_format = "acpstep-session";
inline constexpr int session_version = 1;
inline constexpr const char* engine_version = "acpstep 0.1";

struct SessionSettings {
    Caps caps;

    json to_json() const;
    static SessionSettings from_json(const json& j);
};

std::uint64_t fnv1a64(std::string_view text);
std::string hash_hex(std::uint64_t h);

// One program, its grounding and a computation tree. Not thread-safe; the
// service serializes requests per session.
class Session {
public:
    // Parses and grounds; throws the frontend's Error on bad input.
    Session(std::string source, SessionSettings settings = {});

    static Session load(const json& document);
    json save() const;

    // {id, method, params} -> {id, result} or {id, error}. Events produced by
    // the request are appended to `events`.
    json handle(const json& request, std::vector<json>* events = nullptr);

    // Step-script action: {"op":"step"|"jump"|"retract", ...}. Returns the
    // state payload of the node reached.
    json apply_action(const json& action);

    json state_payload(std::size_t node) const;
    json tree_json() const;
    json status_json(bool check_failed) const;
    json analysis_json() const;

    const std::string& source() const { return source_; }
    const std::string& current_source() const { return edited_source_; }
    const GroundingResult& grounding() const { return grounding_; }
    const GroundProgram& program() const { return grounding_.program; }
    const ComputationTree& tree() const { return tree_; }
    const SessionSettings& settings() const { return settings_; }
    bool desynchronized() const { return desynchronized_; }

    // Records an edit of the source text. The computation keeps using the
    // original grounding; the session is flagged as desynchronized.
    void update_source(std::string text);

    // Ground rule index from a reference: a ground id, a ground rule text, or
    // a source id with a substitution (object form {"source": n, "subst": {...}}).
    std::size_t resolve_rule(const json& ref, const json& subst = nullptr) const;

private:
    json dispatch(const std::string& method, const json& params, std::vector<json>* events);
    json candidates_json() const;
    json instances_json(const json& params) const;
    json validate_json(const json& params) const;
    StepDelta delta_from(const json& params, bool strict) const;
    json log_step(const StepDelta& d) const;

    std::string source_;
    std::string edited_source_;
    SessionSettings settings_;
    GroundingResult grounding_;
    ComputationTree tree_;
    std::vector<json> log_;
    bool desynchronized_ = false;
};

json error_json(const Error& e);
json atoms_json(const AtomSet& atoms);
AtomSet atoms_from_json(const json& j);

// "X=1.Y=a" -> {{"X", 1}, {"Y", a}}; throws Schema on malformed input.
Substitution parse_filter(const std::string& filter);

} // namespace acpstep
