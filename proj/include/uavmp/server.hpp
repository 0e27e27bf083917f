#pragma once

#include <memory>
#include <string>

#include "uavmp/app.hpp"

namespace uavmp::svc {

/// HTTP+JSON front of a Service. Errors come back as problem documents:
/// {type, title, status, issues?}.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    /// Binds without serving; port 0 picks a free port. Returns the bound port, -1 on failure.
    int bind(const std::string& host, int port);
    /// Serves until stop(); blocks.
    bool listen();
    void stop();
    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace uavmp::svc
