#include <acpstep/analysis/analysis.hpp>
#include <acpstep/frontend/grounder.hpp>
#include <acpstep/frontend/parser.hpp>
#include <acpstep/semantics/search.hpp>
#include <acpstep/semantics/semantics.hpp>
#include <acpstep/session/server.hpp>
#include <acpstep/session/session.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace acpstep;

namespace {

enum Exit { Ok = 0, Negative = 1, Usage = 2, Cap = 3 };

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Schema, "cannot read " + path);
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string joined_source(const std::vector<std::string>& files) {
    std::string text;
    for (const std::string& f : files) {
        text += slurp(f);
        if (!text.empty() && text.back() != '\n') {
            text += '\n';
        }
    }
    return text;
}

// Source rules keep their file for error spans; ids continue across files.
GroundingResult ground_files(const std::vector<std::string>& files, const Caps& caps) {
    ProgramAst all;
    for (const std::string& f : files) {
        ProgramAst part = parse_program(slurp(f), f, all.rules.size() + 1);
        std::move(part.rules.begin(), part.rules.end(), std::back_inserter(all.rules));
    }
    return ground(all, caps);
}

json read_json(const std::string& path) {
    try {
        return json::parse(slurp(path));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Schema, path + ": " + e.what());
    }
}

int exit_for(const Error& e) {
    switch (e.code()) {
    case ErrorCode::CapExceeded:
    case ErrorCode::SearchExhausted: return Cap;
    case ErrorCode::NoAnswerSet: return Negative;
    default: return Usage;
    }
}

int run_solve(const GroundingResult& g, std::size_t max_models, const Caps& caps) {
    SearchStatus status = SearchStatus::Complete;
    std::vector<AtomSet> models = solve(g.program, max_models, caps, &status);
    std::sort(models.begin(), models.end());
    for (const AtomSet& m : models) {
        std::cout << m.str() << '\n';
    }
    if (status == SearchStatus::Exhausted) {
        std::cerr << "search cap reached after " << models.size() << " model(s)\n";
        return Cap;
    }
    if (models.empty()) {
        std::cerr << "no answer sets\n";
        return Negative;
    }
    return Ok;
}

int run_check(const GroundingResult& g, const std::string& interpretation, const Caps& caps) {
    AtomSet i = parse_atom_list(interpretation);
    Verdict v = is_answer_set(g.program, i, caps);
    std::cout << (v.is_answer_set() ? "true" : "false") << '\n' << v.str() << '\n';
    return v.is_answer_set() ? Ok : Negative;
}

json script_actions(const json& script) {
    if (script.is_array()) {
        return script;
    }
    if (script.is_object() && script.contains("log")) {
        return script.at("log");
    }
    throw Error(ErrorCode::Schema, "a script is an array of actions or an object with a \"log\"");
}

std::string first_difference(const json& expected, const json& actual) {
    json patch = json::diff(expected, actual);
    return patch.empty() ? std::string{} : patch.front().dump();
}

int run_replay(const std::vector<std::string>& files, const std::string& script_path,
               const std::string& expect_path, const Caps& caps) {
    Session s(joined_source(files), SessionSettings{caps});
    json payloads = json::array();
    for (const json& action : script_actions(read_json(script_path))) {
        payloads.push_back(s.apply_action(action));
        std::cout << payloads.back().dump() << '\n';
    }
    if (expect_path.empty()) {
        return Ok;
    }
    json expected = read_json(expect_path);
    json actual = payloads;
    if (expected.is_object() && expected.contains("nodes")) {
        // a saved session: compare the whole tree
        expected = json{{"nodes", expected.at("nodes")}, {"active", expected.at("active")}};
        json nodes = json::array();
        for (std::size_t i = 0; i < s.tree().size(); ++i) {
            nodes.push_back(s.state_payload(i));
        }
        actual = json{{"nodes", nodes}, {"active", s.tree().active()}};
    }
    if (expected != actual) {
        std::cerr << "replay differs from " << expect_path << ": " << first_difference(expected, actual) << '\n';
        return Negative;
    }
    std::cerr << "replay matches " << expect_path << '\n';
    return Ok;
}

Server* running = nullptr;

void on_signal(int) {
    if (running) {
        running->stop();
    }
}

int run_serve(const std::string& address, unsigned short port, const Caps& caps) {
    SessionManager sessions(SessionSettings{caps});
    Server server(sessions, address, port);
    running = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << address << ':' << server.port() << std::endl;
    server.run();
    running = nullptr;
    return Ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acpstep: stepping debugger for answer-set programs with abstract constraints"};
    app.require_subcommand(1);
    Caps caps = Caps::from_environment();

    std::vector<std::string> files;
    bool emit_ground = false;
    std::size_t max_models = 0;
    std::string interpretation, script, expect, address = "127.0.0.1";
    unsigned short port = 8080;

    auto add_files = [&](CLI::App* sub) { sub->add_option("files", files, "program files")->required()->check(CLI::ExistingFile); };
    auto add_caps = [&](CLI::App* sub) {
        sub->add_option("--atom-cap", caps.atoms, "atom bound for brute-force enumeration");
        sub->add_option("--unfounded-cap", caps.unfounded, "bound on tracked unfounded sets per step");
        sub->add_option("--search-nodes", caps.search_nodes, "bound on answer-set search nodes");
    };

    CLI::App* ground_cmd = app.add_subcommand("ground", "ground a program and print it with provenance");
    add_files(ground_cmd);
    ground_cmd->add_flag("--emit-ground", emit_ground, "print bare ground rules only");

    CLI::App* solve_cmd = app.add_subcommand("solve", "print answer sets, one per line");
    add_files(solve_cmd);
    add_caps(solve_cmd);
    solve_cmd->add_option("--max-models,-n", max_models, "stop after N models (0 = all)");

    CLI::App* check_cmd = app.add_subcommand("check", "check whether an interpretation is an answer set");
    add_files(check_cmd);
    add_caps(check_cmd);
    check_cmd->add_option("--interpretation,-i", interpretation, "comma-separated atoms, e.g. \"a,b(1)\"")->required();

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "normality, convexity, tightness and a stable stepping order");
    add_files(analyze_cmd);
    add_caps(analyze_cmd);

    CLI::App* replay_cmd = app.add_subcommand("replay", "replay a step script and optionally compare the states");
    add_files(replay_cmd);
    add_caps(replay_cmd);
    replay_cmd->add_option("--script", script, "JSON script or saved session")->required()->check(CLI::ExistingFile);
    replay_cmd->add_option("--expect", expect, "expected payloads or saved session")->check(CLI::ExistingFile);

    CLI::App* serve_cmd = app.add_subcommand("serve", "run the HTTP/WebSocket session service");
    serve_cmd->add_option("--port,-p", port, "port (0 picks a free one)");
    serve_cmd->add_option("--address", address, "bind address");
    add_caps(serve_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (*serve_cmd) {
            return run_serve(address, port, caps);
        }
        if (*replay_cmd) {
            return run_replay(files, script, expect, caps);
        }
        GroundingResult g = ground_files(files, caps);
        if (*ground_cmd) {
            if (emit_ground) {
                for (const CRule& r : g.program) {
                    std::cout << r.str() << '\n';
                }
            } else {
                std::cout << g.annotated();
            }
            return Ok;
        }
        if (*solve_cmd) {
            return run_solve(g, max_models, caps);
        }
        if (*check_cmd) {
            return run_check(g, interpretation, caps);
        }
        Session s(joined_source(files), SessionSettings{caps});
        std::cout << s.analysis_json().dump(2) << '\n';
        return Ok;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Usage;
    }
}
