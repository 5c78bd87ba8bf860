#include "sketchsci/service.hpp"

#include <httplib.h>

namespace sketchsci::service {

SessionStore::Lease::Lease(std::shared_ptr<Slot> slot) : slot_(std::move(slot))
{
    std::lock_guard lock(slot_->mutex);
    if (slot_->busy)
        throw Error(ErrorCode::busy, "a task is already running in this session", slot_->session.id);
    slot_->busy = true;
    snapshot_ = slot_->session;
}

SessionStore::Lease::~Lease()
{
    if (!slot_)
        return;
    std::lock_guard lock(slot_->mutex);
    slot_->busy = false;
}

void SessionStore::Lease::commit(engine::Session session)
{
    std::lock_guard lock(slot_->mutex);
    slot_->session = std::move(session);
}

std::string SessionStore::create(Document document)
{
    std::lock_guard lock(mutex_);
    auto id = "s" + std::to_string(next_id_);
    auto slot = std::make_shared<Slot>();
    slot->session = engine::open_session(id, std::move(document));
    slots_.emplace(id, std::move(slot));
    ++next_id_;
    return id;
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end())
        throw Error(ErrorCode::not_found, "no such session", id);
    return it->second;
}

engine::Session SessionStore::snapshot(const std::string& id) const
{
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    return s->session;
}

SessionStore::Lease SessionStore::acquire(const std::string& id) { return Lease(slot(id)); }

engine::Session SessionStore::mutate(const std::string& id, const std::function<engine::Session(engine::Session)>& fn)
{
    auto lease = acquire(id);
    auto next = fn(lease.session());
    lease.commit(next);
    return next;
}

int http_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::not_found:
        return 404;
    case ErrorCode::busy:
        return 409;
    case ErrorCode::infeasible:
    case ErrorCode::exhausted:
    case ErrorCode::inconsistency:
    case ErrorCode::insufficient_data:
    case ErrorCode::no_prediction:
        return 422;
    case ErrorCode::io:
        return 500;
    default:
        return 400;
    }
}

namespace {

    Json parse_body(const httplib::Request& req)
    {
        if (req.body.empty())
            return nullptr;
        try {
            return Json::parse(req.body);
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::validation, "request body is not JSON", e.what());
        }
    }

    void send(httplib::Response& res, int status, const Json& body)
    {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    std::map<CellRef, CellValue> corrections_from_json(const Json& body)
    {
        if (!body.is_object() || !body.contains("corrections") || !body["corrections"].is_array())
            throw Error(ErrorCode::validation, "expected {\"corrections\": [{\"cell\": ..., \"value\": ...}]}");
        std::map<CellRef, CellValue> out;
        for (const auto& item : body["corrections"]) {
            if (!item.is_object() || !item.contains("cell") || !item.contains("value"))
                throw Error(ErrorCode::validation, "a correction needs a cell and a value");
            out[cellref_from_json(item["cell"])] = cell_from_json(item["value"]);
        }
        return out;
    }

    Json task_response(const engine::Session& session)
    {
        const auto& entry = session.entry();
        return {{"kind", entry.kind ? Json(engine::to_string(*entry.kind)) : Json(nullptr)},
            {"summary", entry.summary}, {"state", engine::session_to_json(session)}};
    }

} // namespace

struct Server::Impl {
    SessionStore& store;
    httplib::Server http;

    explicit Impl(SessionStore& s) : store(s) { routes(); }

    /// Runs the handler and turns engine errors into {code, message, details}.
    static httplib::Server::Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn)
    {
        return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Error& e) {
                send(res, http_status(e.code()), engine::error_to_json(e));
            } catch (const Json::exception& e) {
                send(res, 400, engine::error_to_json(Error(ErrorCode::validation, "malformed JSON document", e.what())));
            } catch (const std::exception& e) {
                send(res, 500, engine::error_to_json(Error(ErrorCode::io, "internal error", e.what())));
            }
        };
    }

    void routes()
    {
        http.Post("/sessions", guarded([this](const auto& req, auto& res) {
            auto id = store.create(document_from_json(parse_body(req)));
            send(res, 201, {{"id", id}});
        }));
        http.Get(R"(/sessions/([^/]+))", guarded([this](const auto& req, auto& res) {
            send(res, 200, engine::session_to_json(store.snapshot(req.matches[1])));
        }));
        http.Put(R"(/sessions/([^/]+)/sketch)", guarded([this](const auto& req, auto& res) {
            auto sketch = sketch_from_json(parse_body(req));
            store.mutate(req.matches[1], [&](engine::Session s) { return engine::set_sketch(std::move(s), sketch); });
            res.status = 204;
        }));
        http.Post(R"(/sessions/([^/]+)/tasks/([^/]+))", guarded([this](const auto& req, auto& res) {
            auto kind = engine::task_kind_from_string(req.matches[2].str());
            auto cfg = engine::config_from_json(parse_body(req));
            auto session = store.mutate(
                req.matches[1], [&](engine::Session s) { return engine::run_task(std::move(s), kind, cfg); });
            send(res, 200, task_response(session));
        }));
        http.Post(R"(/sessions/([^/]+)/corrections)", guarded([this](const auto& req, auto& res) {
            auto corrections = corrections_from_json(parse_body(req));
            auto session = store.mutate(req.matches[1],
                [&](engine::Session s) { return engine::apply_corrections(std::move(s), corrections); });
            send(res, 200, task_response(session));
        }));
        http.Post(R"(/sessions/([^/]+)/revert)", guarded([this](const auto& req, auto& res) {
            auto body = parse_body(req);
            if (!body.is_object() || !body.contains("index") || !body["index"].is_number_unsigned())
                throw Error(ErrorCode::validation, "expected {\"index\": n}");
            auto index = body["index"].template get<std::size_t>();
            store.mutate(req.matches[1], [&](engine::Session s) { return engine::revert(std::move(s), index); });
            res.status = 204;
        }));
    }
};

Server::Server(SessionStore& store) : impl_(std::make_unique<Impl>(store)) {}
Server::~Server() = default;

bool Server::listen(const std::string& host, int port) { return impl_->http.listen(host, port); }
int Server::bind_to_any_port(const std::string& host) { return impl_->http.bind_to_any_port(host); }
bool Server::listen_after_bind() { return impl_->http.listen_after_bind(); }
void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }
void Server::stop() { impl_->http.stop(); }

} // namespace sketchsci::service
