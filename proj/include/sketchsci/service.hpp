#pragma once

#include "sketchsci/engine.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace sketchsci::service {

/// In-memory sessions. Reads copy the current snapshot; a mutation holds the
/// session's lease for its whole run and concurrent ones fail with `busy`.
class SessionStore {
    struct Slot {
        std::mutex mutex;
        engine::Session session;
        bool busy = false;
    };

public:
    class Lease {
    public:
        Lease(Lease&&) noexcept = default;
        Lease& operator=(Lease&&) noexcept = default;
        ~Lease();

        const engine::Session& session() const { return snapshot_; }
        void commit(engine::Session session);

    private:
        friend class SessionStore;
        explicit Lease(std::shared_ptr<Slot> slot);
        std::shared_ptr<Slot> slot_;
        engine::Session snapshot_;
    };

    std::string create(Document document);
    engine::Session snapshot(const std::string& id) const;
    /// Throws not-found for unknown ids and busy while another lease is held.
    Lease acquire(const std::string& id);

    /// acquire + commit(fn(session)); returns the committed session.
    engine::Session mutate(const std::string& id, const std::function<engine::Session(engine::Session)>& fn);

private:
    std::shared_ptr<Slot> slot(const std::string& id) const;

    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;
    std::size_t next_id_ = 1;
};

int http_status(ErrorCode code);

/// The JSON API over cpp-httplib.
class Server {
public:
    explicit Server(SessionStore& store);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Blocks until stop().
    bool listen(const std::string& host, int port);
    /// Binds an ephemeral port and returns it (or -1); then call listen_after_bind().
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();
    void wait_until_ready() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace sketchsci::service
