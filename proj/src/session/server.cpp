#include <acpstep/session/server.hpp>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include <atomic>
#include <thread>

namespace acpstep {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

HttpReply fail(unsigned status, const Error& e) { return {status, json{{"error", error_json(e)}}}; }

unsigned status_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::UnknownId: return 404;
    case ErrorCode::CapExceeded:
    case ErrorCode::SearchExhausted: return 422;
    default: return 400;
    }
}

std::vector<std::string_view> segments(std::string_view target) {
    std::size_t q = target.find('?');
    if (q != std::string_view::npos) {
        target = target.substr(0, q);
    }
    std::vector<std::string_view> out;
    while (!target.empty()) {
        std::size_t start = target.find_first_not_of('/');
        if (start == std::string_view::npos) {
            break;
        }
        target = target.substr(start);
        std::size_t end = target.find('/');
        out.push_back(target.substr(0, end));
        target = end == std::string_view::npos ? std::string_view{} : target.substr(end);
    }
    return out;
}

json parse_body(const std::string& body) {
    if (body.empty()) {
        return json::object();
    }
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Schema, std::string("malformed JSON: ") + e.what());
    }
}

json state_of(Session& s) { return s.handle({{"id", nullptr}, {"method", "state.get"}}).at("result"); }

} // namespace

SessionManager::SessionManager(SessionSettings defaults) : defaults_(defaults) {}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionManager::size() const {
    std::lock_guard lock(mutex_);
    return sessions_.size();
}

HttpReply SessionManager::create(const std::string& body) {
    json request = parse_body(body);
    if (!request.is_object()) {
        throw Error(ErrorCode::Schema, "the body must be an object");
    }
    std::shared_ptr<Entry> entry;
    if (request.contains("load")) {
        entry = std::make_shared<Entry>(Session::load(request.at("load")));
    } else {
        if (!request.contains("program") || !request.at("program").is_string()) {
            throw Error(ErrorCode::Schema, "missing field 'program'");
        }
        SessionSettings settings = request.contains("settings") ? SessionSettings::from_json(request.at("settings"))
                                                                : defaults_;
        entry = std::make_shared<Entry>(Session(request.at("program").get<std::string>(), settings));
    }
    json state = state_of(entry->session);
    std::string id;
    {
        std::lock_guard lock(mutex_);
        id = "s" + std::to_string(next_++);
        sessions_.emplace(id, entry);
    }
    return {201, json{{"id", id}, {"state", state}}};
}

HttpReply SessionManager::session_rpc(const std::string& id, const std::string& body) {
    json request = parse_body(body);
    std::vector<json> events;
    std::optional<json> response = handle(id, request, &events);
    if (!response) {
        throw Error(ErrorCode::UnknownId, "no session " + id);
    }
    return {200, json{{"response", *response}, {"events", events}}};
}

HttpReply SessionManager::route(std::string_view method, std::string_view target, const std::string& body) {
    std::vector<std::string_view> path = segments(target);
    try {
        if (path.empty()) {
            if (method == "GET") {
                return {200, json{{"service", engine_version}, {"sessions", "/sessions"}}};
            }
        } else if (path[0] == "sessions" && path.size() == 1) {
            if (method == "POST") {
                return create(body);
            }
            if (method == "GET") {
                std::lock_guard lock(mutex_);
                json ids = json::array();
                for (const auto& [id, entry] : sessions_) {
                    ids.push_back(id);
                }
                return {200, json{{"sessions", ids}}};
            }
        } else if (path[0] == "sessions" && path.size() == 2) {
            std::string id(path[1]);
            if (method == "GET") {
                std::shared_ptr<Entry> entry = find(id);
                if (!entry) {
                    throw Error(ErrorCode::UnknownId, "no session " + id);
                }
                std::lock_guard lock(entry->mutex);
                return {200, json{{"id", id}, {"state", state_of(entry->session)}}};
            }
            if (method == "DELETE") {
                std::lock_guard lock(mutex_);
                if (sessions_.erase(id) == 0) {
                    throw Error(ErrorCode::UnknownId, "no session " + id);
                }
                return {200, json{{"id", id}, {"deleted", true}}};
            }
        } else if (path[0] == "sessions" && path.size() == 3 && path[2] == "rpc") {
            if (method == "POST") {
                return session_rpc(std::string(path[1]), body);
            }
        } else {
            return fail(404, Error(ErrorCode::UnknownId, "no route " + std::string(target)));
        }
        return fail(405, Error(ErrorCode::Schema, std::string(method) + " is not allowed on " + std::string(target)));
    } catch (const Error& e) {
        return fail(status_for(e.code()), e);
    }
}

SessionManager::Attach SessionManager::attach(const std::string& id) {
    std::shared_ptr<Entry> entry = find(id);
    if (!entry) {
        return Attach::NotFound;
    }
    std::lock_guard lock(entry->mutex);
    if (entry->attached) {
        return Attach::Busy;
    }
    entry->attached = true;
    return Attach::Ok;
}

void SessionManager::detach(const std::string& id) {
    if (std::shared_ptr<Entry> entry = find(id)) {
        std::lock_guard lock(entry->mutex);
        entry->attached = false;
    }
}

std::optional<json> SessionManager::handle(const std::string& id, const json& request, std::vector<json>* events) {
    std::shared_ptr<Entry> entry = find(id);
    if (!entry) {
        return std::nullopt;
    }
    std::lock_guard lock(entry->mutex);
    return entry->session.handle(request, events);
}

std::string websocket_session(std::string_view target) {
    std::vector<std::string_view> path = segments(target);
    if (path.size() == 3 && path[0] == "sessions" && path[2] == "ws") {
        return std::string(path[1]);
    }
    return {};
}

struct Server::Impl {
    Impl(SessionManager& m, const std::string& address, unsigned short port)
        : sessions(m), acceptor(io, tcp::endpoint(asio::ip::make_address(address), port)) {}

    void serve(tcp::socket& socket);
    void serve_websocket(tcp::socket& socket, const http::request<http::string_body>& req, const std::string& id);

    SessionManager& sessions;
    asio::io_context io;
    tcp::acceptor acceptor;
    std::atomic<bool> stopping{false};
    std::mutex mutex;
    std::vector<std::thread> threads;
    std::vector<std::weak_ptr<tcp::socket>> open;
};

void Server::Impl::serve_websocket(tcp::socket& socket, const http::request<http::string_body>& req,
                                   const std::string& id) {
    SessionManager::Attach attached = sessions.attach(id);
    if (attached != SessionManager::Attach::Ok) {
        bool busy = attached == SessionManager::Attach::Busy;
        http::response<http::string_body> res{busy ? http::status::conflict : http::status::not_found, req.version()};
        res.set(http::field::content_type, "application/json");
        Error e = busy ? Error(ErrorCode::Schema, "session " + id + " already has a writer")
                       : Error(ErrorCode::UnknownId, "no session " + id);
        res.body() = json{{"error", error_json(e)}}.dump();
        res.prepare_payload();
        beast::error_code ec;
        http::write(socket, res, ec);
        return;
    }
    websocket::stream<tcp::socket&> ws(socket);
    beast::error_code ec;
    ws.accept(req, ec);
    while (!ec) {
        beast::flat_buffer buffer;
        ws.read(buffer, ec);
        if (ec) {
            break;
        }
        json response;
        std::vector<json> events;
        try {
            json request = json::parse(beast::buffers_to_string(buffer.data()));
            std::optional<json> r = sessions.handle(id, request, &events);
            response = r ? *r : json{{"id", request.value("id", json())},
                                     {"error", error_json(Error(ErrorCode::UnknownId, "no session " + id))}};
        } catch (const json::exception& e) {
            response = json{{"id", nullptr}, {"error", error_json(Error(ErrorCode::Schema, e.what()))}};
        }
        ws.text(true);
        ws.write(asio::buffer(response.dump()), ec);
        for (const json& event : events) {
            if (!ec) {
                ws.write(asio::buffer(event.dump()), ec);
            }
        }
    }
    sessions.detach(id);
}

void Server::Impl::serve(tcp::socket& socket) {
    beast::flat_buffer buffer;
    beast::error_code ec;
    for (;;) {
        http::request<http::string_body> req;
        http::read(socket, buffer, req, ec);
        if (ec) {
            break;
        }
        if (websocket::is_upgrade(req)) {
            std::string id = websocket_session(std::string(req.target()));
            if (!id.empty()) {
                serve_websocket(socket, req, id);
                return;
            }
        }
        HttpReply reply = sessions.route(std::string(req.method_string()), std::string(req.target()), req.body());
        http::response<http::string_body> res{static_cast<http::status>(reply.status), req.version()};
        res.set(http::field::content_type, "application/json");
        res.keep_alive(req.keep_alive());
        res.body() = reply.body.dump();
        res.prepare_payload();
        http::write(socket, res, ec);
        if (ec || !res.keep_alive()) {
            break;
        }
    }
    socket.shutdown(tcp::socket::shutdown_send, ec);
}

Server::Server(SessionManager& sessions, const std::string& address, unsigned short port)
    : impl_(std::make_unique<Impl>(sessions, address, port)) {}

Server::~Server() {
    stop();
    for (std::thread& t : impl_->threads) {
        if (t.joinable()) {
            t.join();
        }
    }
}

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
    for (;;) {
        auto socket = std::make_shared<tcp::socket>(impl_->io);
        beast::error_code ec;
        impl_->acceptor.accept(*socket, ec);
        if (impl_->stopping) {
            break;
        }
        if (ec) {
            continue;
        }
        std::lock_guard lock(impl_->mutex);
        impl_->open.push_back(socket);
        impl_->threads.emplace_back([this, socket] { impl_->serve(*socket); });
    }
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(impl_->mutex);
        threads.swap(impl_->threads);
    }
    for (std::thread& t : threads) {
        t.join();
    }
}

void Server::stop() {
    if (impl_->stopping.exchange(true)) {
        return;
    }
    {
        std::lock_guard lock(impl_->mutex);
        for (auto& weak : impl_->open) {
            if (auto s = weak.lock()) {
                beast::error_code ec;
                s->shutdown(tcp::socket::shutdown_both, ec);
            }
        }
    }
    // wake the blocking accept
    beast::error_code ec;
    asio::io_context io;
    tcp::socket wake(io);
    wake.connect(impl_->acceptor.local_endpoint(), ec);
}

} // namespace acpstep
