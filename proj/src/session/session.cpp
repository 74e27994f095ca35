#include <acpstep/session/session.hpp>

#include <acpstep/analysis/analysis.hpp>
#include <acpstep/frontend/parser.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>

namespace acpstep {

namespace {

Error schema(const std::string& message) { return Error(ErrorCode::Schema, message); }

json term_json(const Term& t) {
    if (t.is_number()) {
        return t.number();
    }
    return t.symbol();
}

Term parse_term(const std::string& text) {
    if (text.empty()) {
        throw schema("empty term");
    }
    std::size_t start = text[0] == '-' ? 1 : 0;
    if (start < text.size() && std::all_of(text.begin() + static_cast<long>(start), text.end(),
                                           [](unsigned char c) { return std::isdigit(c); })) {
        return Term::number(std::stoll(text));
    }
    if (!std::islower(static_cast<unsigned char>(text[0])) ||
        !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; })) {
        throw schema("malformed term '" + text + "'");
    }
    return Term::symbol(text);
}

Term term_from_json(const json& j) {
    if (j.is_number_integer()) {
        return Term::number(j.get<std::int64_t>());
    }
    if (j.is_string()) {
        return parse_term(j.get<std::string>());
    }
    throw schema("terms are integers or strings");
}

Substitution subst_from_json(const json& j) {
    if (!j.is_object()) {
        throw schema("subst must be an object");
    }
    Substitution out;
    for (const auto& [var, value] : j.items()) {
        out.emplace_back(var, term_from_json(value));
    }
    std::sort(out.begin(), out.end());
    return out;
}

json subst_json(const Substitution& s) {
    json out = json::object();
    for (const auto& [var, value] : s) {
        out[var] = term_json(value);
    }
    return out;
}

// Every binding in `want` occurs in `have`.
bool binds(const Substitution& have, const Substitution& want) {
    return std::all_of(want.begin(), want.end(), [&](const auto& w) {
        return std::find(have.begin(), have.end(), w) != have.end();
    });
}

json rule_ids(const GroundProgram& all, const GroundProgram& part) {
    json out = json::array();
    for (const CRule& r : part) {
        out.push_back(*all.index_of(r));
    }
    return out;
}

bool is_index(const json& j) {
    return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

std::size_t index_of(const json& j, const char* what) {
    if (!is_index(j)) {
        throw schema(std::string(what) + " must be a nonnegative integer");
    }
    return j.get<std::size_t>();
}

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw schema(std::string("missing field '") + key + "'");
    }
    return j.at(key);
}

const char* edge_kind(Edge::Kind k) {
    switch (k) {
    case Edge::Kind::Root: return "root";
    case Edge::Kind::Step: return "step";
    case Edge::Kind::Jump: return "jump";
    }
    return "?";
}

} // namespace

json SessionSettings::to_json() const {
    return json{{"enumeration_cap", caps.enumeration}, {"atom_cap", caps.atoms},
                {"subset_cap", caps.subset},           {"unfounded_cap", caps.unfounded},
                {"grounding_cap", caps.grounding},     {"search_nodes", caps.search_nodes}};
}

SessionSettings SessionSettings::from_json(const json& j) {
    SessionSettings s;
    if (j.is_null()) {
        return s;
    }
    if (!j.is_object()) {
        throw schema("settings must be an object");
    }
    auto read = [&](const char* key, std::size_t& field) {
        if (j.contains(key)) {
            field = index_of(j.at(key), key);
        }
    };
    read("enumeration_cap", s.caps.enumeration);
    read("atom_cap", s.caps.atoms);
    read("subset_cap", s.caps.subset);
    read("unfounded_cap", s.caps.unfounded);
    read("grounding_cap", s.caps.grounding);
    read("search_nodes", s.caps.search_nodes);
    return s;
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json error_json(const Error& e) {
    json out{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (e.span()) {
        const SourceSpan& s = *e.span();
        out["span"] = {{"file", s.file},
                       {"line", s.begin.line},
                       {"column", s.begin.column},
                       {"end_line", s.end.line},
                       {"end_column", s.end.column}};
    }
    return out;
}

json atoms_json(const AtomSet& atoms) {
    json out = json::array();
    for (Atom a : atoms) {
        out.push_back(a.str());
    }
    return out;
}

AtomSet atoms_from_json(const json& j) {
    if (j.is_null()) {
        return {};
    }
    if (!j.is_array()) {
        throw schema("atom lists are arrays of strings");
    }
    std::vector<Atom> out;
    for (const json& a : j) {
        if (!a.is_string()) {
            throw schema("atom lists are arrays of strings");
        }
        out.push_back(parse_ground_atom(a.get<std::string>()));
    }
    return AtomSet(std::move(out));
}

Substitution parse_filter(const std::string& filter) {
    Substitution out;
    std::size_t pos = 0;
    while (pos <= filter.size()) {
        std::size_t end = filter.find('.', pos);
        if (end == std::string::npos) {
            end = filter.size();
        }
        std::string part = filter.substr(pos, end - pos);
        part.erase(std::remove_if(part.begin(), part.end(), [](unsigned char c) { return std::isspace(c); }),
                   part.end());
        if (part.empty() && !(pos == 0 && end == filter.size())) {
            throw schema("empty entry in filter '" + filter + "'");
        }
        if (!part.empty()) {
            std::size_t eq = part.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw schema("filter entries have the form Var=term, got '" + part + "'");
            }
            std::string var = part.substr(0, eq);
            if (!std::isupper(static_cast<unsigned char>(var[0])) && var[0] != '_') {
                throw schema("'" + var + "' is not a variable");
            }
            out.emplace_back(var, parse_term(part.substr(eq + 1)));
        }
        pos = end + 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

Session::Session(std::string source, SessionSettings settings)
    : source_(std::move(source)), edited_source_(source_), settings_(settings),
      grounding_(ground_text(source_, settings_.caps, "input")) {}

void Session::update_source(std::string text) {
    desynchronized_ = desynchronized_ || text != source_;
    edited_source_ = std::move(text);
}

std::size_t Session::resolve_rule(const json& ref, const json& subst) const {
    if (is_index(ref) && subst.is_null()) {
        std::size_t id = ref.get<std::size_t>();
        if (id >= program().size()) {
            throw Error(ErrorCode::UnknownId, "no ground rule " + std::to_string(id));
        }
        return id;
    }
    if (ref.is_string()) {
        CRule r = parse_ground_rule(ref.get<std::string>());
        std::optional<std::size_t> id = program().index_of(r);
        if (!id) {
            throw Error(ErrorCode::UnknownId, "rule " + r.str() + " is not in the ground program");
        }
        return *id;
    }
    if (ref.is_object()) {
        if (ref.contains("ground")) {
            return resolve_rule(ref.at("ground"), nullptr);
        }
        const json& source = require(ref, "source");
        return resolve_rule(source, ref.contains("subst") ? ref.at("subst") : json::object());
    }
    if (is_index(ref)) {
        std::size_t source = ref.get<std::size_t>();
        if (grounding_.source_rule(source) == nullptr) {
            throw Error(ErrorCode::UnknownId, "no source rule r" + std::to_string(source));
        }
        Substitution want = subst_from_json(subst);
        std::vector<std::size_t> hits;
        for (std::size_t i : grounding_.instances_of(source)) {
            for (const Provenance& p : grounding_.provenance[i]) {
                if (p.source == source && binds(p.substitution, want)) {
                    hits.push_back(i);
                    break;
                }
            }
        }
        if (hits.size() != 1) {
            throw Error(ErrorCode::UnknownId, std::to_string(hits.size()) + " instances of r" + std::to_string(source) +
                                                  " match " + subst_json(want).dump());
        }
        return hits.front();
    }
    throw schema("a rule is a ground id, a ground rule text or {\"source\": id, \"subst\": {...}}");
}

json Session::state_payload(std::size_t id) const {
    const TreeNode& n = tree_.node(id);
    const State& s = n.state;
    json unfounded = json::array();
    for (const AtomSet& x : s.nonempty_unfounded()) {
        unfounded.push_back(atoms_json(x));
    }
    std::vector<State> path{s};
    StatusReport status = computation_status(program(), path, false, settings_.caps);
    return json{{"node", id},
                {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                {"rules", rule_ids(program(), s.rules)},
                {"pos", atoms_json(s.pos)},
                {"neg", atoms_json(s.neg)},
                {"unfounded", unfounded},
                {"stable", s.stable()},
                {"status", to_string(status.status)}};
}

json Session::tree_json() const {
    json nodes = json::array();
    for (const TreeNode& n : tree_.nodes()) {
        json edge{{"kind", edge_kind(n.edge.kind)}};
        if (n.edge.step) {
            edge["rule"] = *program().index_of(n.edge.step->rule);
            edge["true"] = atoms_json(n.edge.step->delta_true);
            edge["false"] = atoms_json(n.edge.step->delta_false);
        }
        if (n.edge.kind == Edge::Kind::Jump) {
            edge["rules"] = rule_ids(program(), n.edge.selected);
            edge["model"] = atoms_json(n.edge.model);
        }
        nodes.push_back({{"id", n.id},
                         {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                         {"children", n.children},
                         {"edge", edge},
                         {"stable", n.state.stable()}});
    }
    return json{{"active", tree_.active()}, {"path", tree_.active_path()}, {"nodes", nodes}};
}

json Session::status_json(bool check_failed) const {
    std::vector<State> path = tree_.path_states();
    StatusReport r = computation_status(program(), path, check_failed, settings_.caps);
    json out{{"status", to_string(r.status)},
             {"complete", r.complete},
             {"stable", r.stable},
             {"stuck", r.stuck},
             {"failed_checked", r.failed_checked},
             {"failed_at", r.failed_at ? json(*r.failed_at) : json(nullptr)}};
    return out;
}

json Session::analysis_json() const {
    Guarantee g = stable_guarantee(program(), settings_.caps);
    json out{{"normal", g.normal},
             {"convex", g.convex},
             {"tight", g.tight},
             {"stable_guarantee", g.stable_guarantee},
             {"cycle_witness", g.tight ? json(nullptr) : json(atoms_json(AtomSet{}))},
             {"violation", g.violation ? json(*g.violation) : json(nullptr)}};
    if (!g.tight) {
        json cycle = json::array();
        for (Atom a : g.cycle_witness) {
            cycle.push_back(a.str());
        }
        out["cycle_witness"] = cycle;
    }
    if (g.stable_guarantee) {
        json order = json::array();
        for (const CRule& r : g.order) {
            order.push_back(*program().index_of(r));
        }
        out["order"] = order;
    }
    return out;
}

json Session::candidates_json() const {
    const State& s = tree_.current();
    std::map<std::size_t, std::vector<std::size_t>> candidates;
    std::map<std::size_t, std::vector<std::size_t>> constraints;
    std::vector<std::size_t> admissible = active_candidates(program(), s, settings_.caps);
    for (std::size_t i : active_unconsidered(program(), s)) {
        bool ok = std::binary_search(admissible.begin(), admissible.end(), i);
        for (const Provenance& p : grounding_.provenance[i]) {
            if (ok) {
                candidates[p.source].push_back(i);
            }
            if (program()[i].is_constraint()) {
                constraints[p.source].push_back(i);
            }
        }
    }
    auto group = [&](const std::map<std::size_t, std::vector<std::size_t>>& m) {
        json out = json::array();
        for (const auto& [source, ids] : m) {
            const RuleAst* r = grounding_.source_rule(source);
            out.push_back({{"source", source},
                           {"text", r->text},
                           {"constraint", r->head.kind == HeadAst::Kind::Constraint},
                           {"instances", ids}});
        }
        return out;
    };
    return json{{"candidates", group(candidates)}, {"active_constraints", group(constraints)}};
}

json Session::instances_json(const json& params) const {
    std::size_t source = index_of(require(params, "source"), "source");
    if (grounding_.source_rule(source) == nullptr) {
        throw Error(ErrorCode::UnknownId, "no source rule r" + std::to_string(source));
    }
    Substitution filter = parse_filter(params.value("filter", std::string{}));
    std::string scope = params.value("scope", std::string("candidates"));
    if (scope != "candidates" && scope != "unconsidered" && scope != "all") {
        throw schema("scope is one of candidates, unconsidered, all");
    }
    const State& s = tree_.current();
    json out = json::array();
    for (std::size_t i : grounding_.instances_of(source)) {
        const Provenance* match = nullptr;
        for (const Provenance& p : grounding_.provenance[i]) {
            if (p.source == source && binds(p.substitution, filter)) {
                match = &p;
                break;
            }
        }
        if (match == nullptr) {
            continue;
        }
        const CRule& r = program()[i];
        bool considered = s.rules.contains(r);
        bool active = rule_active(r, s.pos);
        bool candidate = !considered && active && admits_successor(s, r, settings_.caps);
        if ((scope == "candidates" && !candidate) || (scope == "unconsidered" && considered)) {
            continue;
        }
        out.push_back({{"id", i},
                       {"text", r.str()},
                       {"subst", subst_json(match->substitution)},
                       {"considered", considered},
                       {"active", active},
                       {"candidate", candidate}});
    }
    return json{{"instances", out}};
}

StepDelta Session::delta_from(const json& params, bool fill) const {
    const json& ref = params.contains("rule") ? params.at("rule") : params;
    std::size_t id = resolve_rule(ref, params.contains("subst") ? params.at("subst") : json(nullptr));
    StepDelta d{program()[id], atoms_from_json(params.value("true", json())),
                atoms_from_json(params.value("false", json()))};
    if (!fill) {
        return d;
    }
    const State& s = tree_.current();
    AtomSet rest = undecided_atoms(s, d.rule) - d.delta_true - d.delta_false;
    if (rest.empty() || !rule_active(d.rule, s.pos)) {
        return d;
    }
    AssignmentSpace space = assignment_space(s, d.rule, settings_.caps, d.delta_true, d.delta_false);
    d.delta_true = d.delta_true | (space.forced_true & rest);
    d.delta_false = d.delta_false | (space.forced_false & rest);
    rest = rest - space.forced_true - space.forced_false;
    std::string fallback = params.value("rest", std::string{});
    if (fallback == "true") {
        d.delta_true = d.delta_true | rest;
    } else if (fallback == "false") {
        d.delta_false = d.delta_false | rest;
    } else if (!fallback.empty()) {
        throw schema("rest is \"true\" or \"false\"");
    }
    return d;
}

json Session::validate_json(const json& params) const {
    StepDelta d = delta_from(params, false);
    const State& s = tree_.current();
    StepCheck c = validate_assignment(s, d);
    AtomSet undecided = undecided_atoms(s, d.rule);
    json out{{"ok", c.ok()},
             {"kind", to_string(c.kind)},
             {"message", c.message},
             {"rule", *program().index_of(d.rule)},
             {"undecided", atoms_json(undecided)}};
    if (!s.rules.contains(d.rule) && rule_active(d.rule, s.pos)) {
        AssignmentSpace space = assignment_space(s, d.rule, settings_.caps, d.delta_true & undecided,
                                                 d.delta_false & undecided);
        out["admissible"] = space.admissible;
        out["forced_true"] = atoms_json(space.forced_true);
        out["forced_false"] = atoms_json(space.forced_false);
    } else {
        out["admissible"] = false;
        out["forced_true"] = json::array();
        out["forced_false"] = json::array();
    }
    return out;
}

json Session::log_step(const StepDelta& d) const {
    return json{{"op", "step"},
                {"rule", d.rule.str()},
                {"true", atoms_json(d.delta_true)},
                {"false", atoms_json(d.delta_false)}};
}

json Session::apply_action(const json& action) {
    const std::string op = require(action, "op").get<std::string>();
    if (op == "step") {
        StepDelta d = delta_from(action, true);
        tree_.step(d, settings_.caps);
        log_.push_back(log_step(d));
    } else if (op == "jump") {
        std::vector<CRule> selected;
        if (action.contains("sources")) {
            for (const json& source : action.at("sources")) {
                std::size_t id = index_of(source, "source");
                if (grounding_.source_rule(id) == nullptr) {
                    throw Error(ErrorCode::UnknownId, "no source rule r" + std::to_string(id));
                }
                for (std::size_t i : grounding_.instances_of(id)) {
                    selected.push_back(program()[i]);
                }
            }
        }
        if (action.contains("rules")) {
            for (const json& ref : action.at("rules")) {
                selected.push_back(program()[resolve_rule(ref)]);
            }
        }
        std::size_t from = tree_.active();
        std::size_t node = tree_.jump(GroundProgram(std::move(selected)), settings_.caps);
        const Edge& edge = tree_.node(node).edge;
        if (action.contains("model") && atoms_from_json(action.at("model")) != edge.model) {
            tree_.retract(from);
            throw schema("the jump reached " + edge.model.str() + ", not the recorded model");
        }
        json texts = json::array();
        for (const CRule& r : edge.selected) {
            texts.push_back(r.str());
        }
        log_.push_back({{"op", "jump"}, {"rules", texts}, {"model", atoms_json(edge.model)}});
    } else if (op == "retract") {
        std::size_t node = index_of(require(action, "node"), "node");
        tree_.retract(node);
        log_.push_back({{"op", "retract"}, {"node", node}});
    } else {
        throw schema("unknown op '" + op + "'");
    }
    return state_payload(tree_.active());
}

json Session::handle(const json& request, std::vector<json>* events) {
    json id = request.is_object() && request.contains("id") ? request.at("id") : json(nullptr);
    try {
        const std::string method = require(request, "method").get<std::string>();
        json params = request.value("params", json::object());
        if (!params.is_object()) {
            throw schema("params must be an object");
        }
        return json{{"id", id}, {"result", dispatch(method, params, events)}};
    } catch (const Error& e) {
        return json{{"id", id}, {"error", error_json(e)}};
    } catch (const json::exception& e) {
        return json{{"id", id}, {"error", error_json(schema(e.what()))}};
    }
}

json Session::dispatch(const std::string& method, const json& params, std::vector<json>* events) {
    auto changed = [&](json payload) {
        if (events) {
            events->push_back({{"event", "state.changed"}, {"payload", payload}});
        }
        return payload;
    };
    auto mutating = [&](const char* op) {
        if (desynchronized_ && params.value("strict", false)) {
            throw Error(ErrorCode::Desynchronized, "the source was edited after the session started");
        }
        json action = params;
        action["op"] = op;
        return action;
    };
    if (method == "candidates.list") {
        return candidates_json();
    }
    if (method == "instances.list") {
        return instances_json(params);
    }
    if (method == "step.validate") {
        return validate_json(params);
    }
    if (method == "step.apply") {
        return changed(apply_action(mutating("step")));
    }
    if (method == "jump.apply") {
        json payload = apply_action(mutating("jump"));
        const TreeNode& n = tree_.node(tree_.active());
        json result = payload;
        result["model"] = atoms_json(n.edge.model);
        result["added"] = rule_ids(program(), n.state.rules - tree_.node(*n.parent).state.rules);
        changed(payload);
        return result;
    }
    if (method == "jump.expand") {
        std::size_t id = params.value("node", tree_.active());
        const TreeNode& n = tree_.node(id);
        if (n.edge.kind != Edge::Kind::Jump) {
            throw Error(ErrorCode::InvalidStep, "node " + std::to_string(id) + " was not reached by a jump");
        }
        json steps = json::array();
        for (const StepDelta& d : expand_jump(tree_.node(*n.parent).state, n.state, settings_.caps)) {
            steps.push_back({{"rule", *program().index_of(d.rule)},
                             {"text", d.rule.str()},
                             {"true", atoms_json(d.delta_true)},
                             {"false", atoms_json(d.delta_false)}});
        }
        return json{{"node", id}, {"steps", steps}};
    }
    if (method == "retract") {
        return changed(apply_action(mutating("retract")));
    }
    if (method == "status") {
        return status_json(params.value("check_failed", false));
    }
    if (method == "analyze") {
        return analysis_json();
    }
    if (method == "state.get") {
        return json{{"state", state_payload(tree_.active())},
                    {"tree", tree_json()},
                    {"desynchronized", desynchronized_},
                    {"source_hash", hash_hex(fnv1a64(source_))}};
    }
    if (method == "session.save") {
        return save();
    }
    if (method == "source.update") {
        update_source(require(params, "program").get<std::string>());
        if (events) {
            events->push_back({{"event", "session.desynchronized"}, {"payload", {{"desynchronized", desynchronized_}}}});
        }
        return json{{"desynchronized", desynchronized_}};
    }
    throw schema("unknown method '" + method + "'");
}

json Session::save() const {
    json rules = json::array();
    for (const CRule& r : program()) {
        rules.push_back(r.str());
    }
    json nodes = json::array();
    for (std::size_t i = 0; i < tree_.size(); ++i) {
        nodes.push_back(state_payload(i));
    }
    json out{{"format", session_format},
             {"version", session_version},
             {"engine", engine_version},
             {"source", source_},
             {"source_hash", hash_hex(fnv1a64(source_))},
             {"settings", settings_.to_json()},
             {"ground_rules", rules},
             {"log", log_},
             {"nodes", nodes},
             {"active", tree_.active()},
             {"desynchronized", desynchronized_}};
    if (desynchronized_) {
        out["edited_source"] = edited_source_;
    }
    return out;
}

Session Session::load(const json& doc) {
    try {
        if (require(doc, "format") != session_format) {
            throw schema("not a session document");
        }
        if (require(doc, "version") != session_version) {
            throw Error(ErrorCode::VersionMismatch, "session version " + doc.at("version").dump() + " is not supported");
        }
        const std::string source = require(doc, "source").get<std::string>();
        if (require(doc, "source_hash").get<std::string>() != hash_hex(fnv1a64(source))) {
            throw Error(ErrorCode::VersionMismatch, "source hash mismatch");
        }
        Session s(source, SessionSettings::from_json(doc.value("settings", json())));
        const json& rules = require(doc, "ground_rules");
        if (!rules.is_array() || rules.size() != s.program().size()) {
            throw Error(ErrorCode::VersionMismatch, "the grounding differs from the saved one");
        }
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (rules[i] != s.program()[i].str()) {
                throw Error(ErrorCode::VersionMismatch, "the grounding differs from the saved one at rule " +
                                                            std::to_string(i));
            }
        }
        const json& log = require(doc, "log");
        for (std::size_t i = 0; i < log.size(); ++i) {
            try {
                s.apply_action(log[i]);
            } catch (const Error& e) {
                throw schema("log entry " + std::to_string(i) + ": " + e.what());
            }
        }
        const json& nodes = require(doc, "nodes");
        if (!nodes.is_array() || nodes.size() != s.tree().size()) {
            throw schema("saved nodes do not match the replayed log");
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i] != s.state_payload(i)) {
                throw schema("saved node " + std::to_string(i) + " does not match the replayed log");
            }
        }
        std::size_t active = index_of(require(doc, "active"), "active");
        if (active != s.tree().active()) {
            throw schema("saved active node does not match the replayed log");
        }
        if (doc.value("desynchronized", false)) {
            s.update_source(doc.value("edited_source", std::string{}));
            s.desynchronized_ = true;
        }
        return s;
    } catch (const json::exception& e) {
        throw schema(e.what());
    }
}

} // namespace acpstep
