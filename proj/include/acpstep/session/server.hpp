#pragma once

#include <acpstep/session/session.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace acpstep {

struct HttpReply {
    unsigned status = 200;
    json body;
};

// Owns the live sessions. Each session has its own lock, so requests to one
// session are serialized while distinct sessions proceed independently.
class SessionManager {
public:
    explicit SessionManager(SessionSettings defaults = {});

    // POST /sessions, GET /sessions/{id}, DELETE /sessions/{id},
    // POST /sessions/{id}/rpc
    HttpReply route(std::string_view method, std::string_view target, const std::string& body);

    enum class Attach { Ok, NotFound, Busy };
    // The WebSocket of a session is its single writer.
    Attach attach(const std::string& id);
    void detach(const std::string& id);

    // Runs one protocol request; nullopt when the session is gone.
    std::optional<json> handle(const std::string& id, const json& request, std::vector<json>* events);

    std::size_t size() const;

private:
    struct Entry {
        explicit Entry(Session s) : session(std::move(s)) {}
        std::mutex mutex;
        Session session;
        bool attached = false;
    };

    std::shared_ptr<Entry> find(const std::string& id) const;
    HttpReply create(const std::string& body);
    HttpReply session_rpc(const std::string& id, const std::string& body);

    SessionSettings defaults_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> sessions_;
    std::size_t next_ = 1;
};

// "/sessions/s1/ws" -> "s1"; empty when the target is not a WebSocket path.
std::string websocket_session(std::string_view target);

// Blocking HTTP + WebSocket server, one thread per connection.
class Server {
public:
    // Binds immediately; port 0 picks a free port.
    Server(SessionManager& sessions, const std::string& address, unsigned short port);
    ~Server();

    unsigned short port() const;
    void run();
    // Safe to call from another thread; run() returns once open connections end.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace acpstep
