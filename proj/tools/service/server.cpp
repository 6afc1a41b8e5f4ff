#include "server.hpp"

#include <iostream>

#include <json.hpp>

namespace restopath::service {

namespace {

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = {{"code", code}, {"message", message}};
    res.status = status;
    res.set_content(j.dump() + "\n", kJson);
}

// Wraps a handler so ServiceError and anything else become JSON errors.
template <typename F>
httplib::Server::Handler handler(F body) {
    return [body](const httplib::Request& req, httplib::Response& res) {
        try {
            body(req, res);
        } catch (const ServiceError& e) {
            send_error(res, e.http_status(), e.code(), e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal_error", e.what());
        }
    };
}

} // namespace

void install_routes(httplib::Server& server, SessionStore& store) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Post("/scenarios", handler([&](const httplib::Request& req, httplib::Response& res) {
        const auto id = store.create_scenario(req.body);
        res.status = 201;
        res.set_content(nlohmann::ordered_json{{"id", id}}.dump() + "\n", kJson);
    }));
    server.Get(R"(/scenarios/([^/]+))", handler([&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(store.scenario_document(req.matches[1]), kJson);
    }));
    server.Get(R"(/scenarios/([^/]+)/events)", handler([&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(store.event_log(req.matches[1]), kJson);
    }));
    server.Post(R"(/scenarios/([^/]+)/events)", handler([&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(store.apply_event(req.matches[1], req.body), kJson);
    }));
    server.Post(R"(/scenarios/([^/]+)/solve)", handler([&](const httplib::Request& req, httplib::Response& res) {
        const auto run = store.start_solve(req.matches[1], req.body);
        res.status = 202;
        res.set_content(nlohmann::ordered_json{{"run_id", run}}.dump() + "\n", kJson);
    }));
    server.Get(R"(/runs/([^/]+))", handler([&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(store.run_status(req.matches[1]), kJson);
    }));
    server.Get(R"(/runs/([^/]+)/ranking)", handler([&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(store.run_report(req.matches[1]), kJson);
    }));
    server.Post(R"(/runs/([^/]+)/cancel)", handler([&](const httplib::Request& req, httplib::Response& res) {
        store.cancel_run(req.matches[1]);
        res.status = 202;
        res.set_content(store.run_status(req.matches[1]), kJson);
    }));
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) send_error(res, res.status, "not_found", "no such endpoint");
    });
}

bool serve(SessionStore& store, const std::string& host, int port) {
    httplib::Server server;
    install_routes(server, store);
    if (!server.bind_to_port(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return false;
    }
    std::cerr << "restopath service listening on " << host << ":" << port << "\n";
    return server.listen_after_bind();
}

} // namespace restopath::service
