#include "uavmp/server.hpp"

#include <httplib.h>

#include "uavmp/wire.hpp"

namespace uavmp::svc {

namespace {

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void problem(httplib::Response& res, int status, const std::string& type, const std::string& title,
             const json& issues = json()) {
    json p = {{"type", type}, {"title", title}, {"status", status}};
    if (!issues.is_null()) p["issues"] = issues;
    res.status = status;
    res.set_content(p.dump(), "application/problem+json");
}

json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json j = json::parse(req.body, nullptr, false);
    if (j.is_discarded()) throw ValidationError("", "request body is not valid JSON");
    return j;
}

double query_number(const httplib::Request& req, const char* key, double fallback) {
    if (!req.has_param(key)) return fallback;
    try {
        std::size_t used = 0;
        const std::string v = req.get_param_value(key);
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError(std::string("?") + key, "expected a number");
    }
}

// Every handler goes through here so exceptions map to one status table.
template <class F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ValidationError& e) {
            problem(res, 400, "validation_error", e.what(), wire::issues_json(e.issues()));
        } catch (const BadRequest& e) {
            problem(res, 400, "bad_request", e.what());
        } catch (const NotFound& e) {
            problem(res, 404, "not_found", e.what());
        } catch (const Conflict& e) {
            problem(res, 409, "conflict", e.what());
        } catch (const DriftError& e) {
            problem(res, 409, "drift", e.what());
        } catch (const IoError& e) {
            problem(res, 500, "io_error", e.what());
        } catch (const std::exception& e) {
            problem(res, 500, "internal_error", e.what());
        }
    };
}

} // namespace

struct HttpServer::Impl {
    Service& svc;
    httplib::Server http;

    explicit Impl(Service& s) : svc(s) { routes(); }

    void routes() {
        http.Get("/health", guarded([](const auto&, auto& res) { send(res, 200, {{"status", "ok"}}); }));

        http.Get("/missions", guarded([this](const auto&, auto& res) { send(res, 200, svc.missions()); }));
        http.Post("/missions", guarded([this](const auto& req, auto& res) { send(res, 201, svc.create_mission(body_of(req))); }));
        http.Get(R"(/missions/([^/]+))", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.mission(req.matches[1]));
        }));
        http.Put(R"(/missions/([^/]+))", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.put_mission(req.matches[1], body_of(req)));
        }));
        http.Post(R"(/missions/([^/]+)/plan)", guarded([this](const auto& req, auto& res) {
            send(res, 202, svc.submit_plan(req.matches[1], body_of(req)));
        }));
        http.Get(R"(/missions/([^/]+)/plans)", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.runs(req.matches[1]));
        }));
        http.Get(R"(/missions/([^/]+)/plans/([^/]+))", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.plan_result(req.matches[1], req.matches[2]));
        }));

        http.Get(R"(/jobs/([^/]+))", guarded([this](const auto& req, auto& res) { send(res, 200, svc.job(req.matches[1])); }));
        http.Delete(R"(/jobs/([^/]+))", guarded([this](const auto& req, auto& res) {
            send(res, 202, svc.cancel_job(req.matches[1]));
        }));

        http.Post("/sessions", guarded([this](const auto& req, auto& res) { send(res, 201, svc.start_session(body_of(req))); }));
        http.Get(R"(/sessions/([^/]+))", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.session(req.matches[1]));
        }));
        http.Post(R"(/sessions/([^/]+)/pace)", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.pace(req.matches[1], body_of(req)));
        }));
        http.Post(R"(/sessions/([^/]+)/advance)", guarded([this](const auto& req, auto& res) {
            const json b = body_of(req);
            if (!b.contains("seconds") || !b["seconds"].is_number()) throw ValidationError("/seconds", "expected a number");
            send(res, 200, svc.advance(req.matches[1], b["seconds"].get<double>()));
        }));
        http.Get(R"(/sessions/([^/]+)/snapshot)", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.snapshot(req.matches[1], query_number(req, "delta", 0.0)));
        }));
        http.Post(R"(/sessions/([^/]+)/objectives)", guarded([this](const auto& req, auto& res) {
            send(res, 201, svc.inject(req.matches[1], body_of(req)));
        }));
        http.Post(R"(/sessions/([^/]+)/replan)", guarded([this](const auto& req, auto& res) {
            send(res, 202, svc.replan(req.matches[1], body_of(req)));
        }));
        http.Post(R"(/sessions/([^/]+)/apply)", guarded([this](const auto& req, auto& res) {
            send(res, 200, svc.apply(req.matches[1], body_of(req)));
        }));
        http.Get(R"(/sessions/([^/]+)/telemetry)", guarded([this](const auto& req, auto& res) {
            const std::string id = req.matches[1];
            // ?follow=0 returns the log so far and closes
            if (req.has_param("follow") && req.get_param_value("follow") == "0") {
                res.set_content(svc.events(id), "application/x-ndjson");
                return;
            }
            auto sub = svc.subscribe(id);
            res.set_chunked_content_provider(
                "application/x-ndjson",
                [sub](std::size_t, httplib::DataSink& sink) {
                    while (auto line = sub->next(std::chrono::milliseconds(250))) {
                        *line += '\n';
                        if (!sink.write(line->data(), line->size())) return false;
                    }
                    if (sub->closed()) {
                        sink.done();
                        return true;
                    }
                    return sink.is_writable();
                },
                [sub](bool) { sub->close(); });
        }));
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->http.bind_to_any_port(host);
    return impl_->http.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->http.listen_after_bind(); }
void HttpServer::stop() { impl_->http.stop(); }
bool HttpServer::running() const { return impl_->http.is_running(); }

} // namespace uavmp::svc
