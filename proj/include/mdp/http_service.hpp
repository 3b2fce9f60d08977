#pragma once

// HTTP+JSON front end for SessionStore.
//
//   GET  /health
//   POST /sessions                    body: mdp-domain or mdp-scenario document, optional "s"
//   GET  /sessions/:id
//   POST /sessions/:id/ops            body: {"op", ..., "revision"?}
//   POST /sessions/:id/optimize       body: optimizer params (all optional)
//   GET  /sessions/:id/export?kind=svg|scenario
//   GET  /jobs/:id
//   POST /jobs/:id/accept
//   POST /jobs/:id/cancel
//
// Errors are {"code", "message", "detail"} with 400 (parse_error),
// 404 (not_found), 409 (conflict), 422 (invalid_input), 500 (internal).

#include <sys/socket.h>

#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <utility>

#include "httplib.h"
#include "json.hpp"

#include "mdp/errors.hpp"
#include "mdp/io.hpp"
#include "mdp/session.hpp"

namespace mdp {

using nlohmann::json;

inline json snapshot_json(const SessionSnapshot& snap) {
  return json{{"id", snap.id},
              {"revision", snap.revision},
              {"name", snap.name},
              {"s", snap.s},
              {"domain", io::domain_json(*snap.domain)},
              {"centers", io::to_json(snap.centers)},
              {"mst", io::to_json(snap.mst)},
              {"verdict", io::to_json(snap.verdict)}};
}

inline json job_json(const JobStatus& job) {
  json j{{"id", job.id},
         {"session", job.session},
         {"base_revision", job.base_revision},
         {"state", to_string(job.state)},
         {"iteration", job.iteration},
         {"accepted", job.accepted}};
  j["best"] = std::isfinite(job.best) ? json(job.best) : json(nullptr);
  j["history"] = job.history;
  if (job.result) {
    j["result"] = {{"centers", io::to_json(job.result->centers.points)},
                   {"objective", job.result->objective},
                   {"verdict", io::to_json(job.result->verdict)}};
  }
  if (!job.error.empty()) j["error"] = job.error;
  return j;
}

/// Parses an ops request body into a mutation and optional expected revision.
inline std::pair<Mutation, std::optional<std::uint64_t>> parse_mutation(const json& body) {
  if (!body.is_object()) throw InvalidInput("ops: expected an object");
  const json& op = io::detail::member(body, "op", "ops");
  if (!op.is_string()) throw InvalidInput("ops.op: expected a string");
  const std::string name = op.get<std::string>();
  auto index = [&] {
    const json& v = io::detail::member(body, "index", "ops");
    if (!v.is_number_unsigned()) throw InvalidInput("ops.index: expected a nonnegative integer");
    return v.get<std::size_t>();
  };
  auto point = [&] { return io::detail::point(io::detail::member(body, "point", "ops"), "ops.point"); };
  std::optional<std::uint64_t> revision;
  if (const auto it = body.find("revision"); it != body.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw InvalidInput("ops.revision: expected a nonnegative integer");
    revision = it->get<std::uint64_t>();
  }
  if (name == "add_vertex") return {ops::AddVertex{point()}, revision};
  if (name == "remove_vertex") return {ops::RemoveVertex{index()}, revision};
  if (name == "move_vertex") return {ops::MoveVertex{index(), point()}, revision};
  if (name == "set_radius") {
    return {ops::SetRadius{io::detail::number(io::detail::member(body, "s", "ops"), "ops.s")},
            revision};
  }
  throw InvalidInput("ops.op: unknown operation '" + name + "'");
}

class HttpService {
 public:
  explicit HttpService(SessionStore& store) : store_(store) {
    // SO_REUSEADDR only: a second server must fail to bind a port in use.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    });
    routes();
  }

  ~HttpService() { stop(); }

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds host:port (port 0 picks a free port). False if the port is taken.
  bool bind(const std::string& host, int port) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
      return port_ > 0;
    }
    if (!server_.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
  }

  int port() const { return port_; }

  /// Serves until stop(); call after bind().
  void run() { server_.listen_after_bind(); }

  /// Serves on a background thread; returns once the server accepts.
  void start() {
    thread_ = std::thread([this] { run(); });
    server_.wait_until_ready();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  static void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  static void send_error(httplib::Response& res, int status, const std::string& code,
                         const std::string& message, json detail = json::object()) {
    send_json(res, status, json{{"code", code}, {"message", message}, {"detail", std::move(detail)}});
  }

  // Runs a handler, mapping library exceptions onto error responses.
  template <typename F>
  static void guarded(httplib::Response& res, F&& f) {
    try {
      f();
    } catch (const ParseError& e) {
      send_error(res, 400, "parse_error", e.what(), json{{"position", e.position()}});
    } catch (const NotFound& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const Conflict& e) {
      send_error(res, 409, "conflict", e.what(), json{{"current", snapshot_json(*e.current())}});
    } catch (const InvalidInput& e) {
      send_error(res, 422, "invalid_input", e.what());
    } catch (const ToleranceFailure& e) {
      send_error(res, 500, "tolerance_failure", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  }

  static json body_json(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    return io::detail::parse_json(req.body);
  }

  void routes() {
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, json{{"status", "ok"}});
    });

    server_.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = body_json(req);
        const json& f = io::detail::member(body, "format", "document");
        SnapshotPtr snap;
        if (f.is_string() && f.get<std::string>() == "mdp-scenario") {
          io::Scenario sc = io::load_scenario(req.body);
          snap = store_.create(std::move(sc.domain), sc.name, sc.s, std::move(sc.centers));
        } else {
          io::DomainDoc doc = io::load_domain_doc(req.body);
          std::optional<double> s;
          if (const auto it = body.find("s"); it != body.end()) s = io::detail::number(*it, "s");
          snap = store_.create(std::move(doc.domain), doc.name, s);
        }
        send_json(res, 201, snapshot_json(*snap));
      });
    });

    server_.Get("/sessions/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, snapshot_json(*store_.get(req.path_params.at("id")))); });
    });

    server_.Post("/sessions/:id/ops", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto [mutation, revision] = parse_mutation(body_json(req));
        send_json(res, 200, snapshot_json(*store_.mutate(req.path_params.at("id"), mutation, revision)));
      });
    });

    server_.Post("/sessions/:id/optimize", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = body_json(req);
        const OptimizerParams params = io::detail::optimizer_from_json(body);
        const std::string job = store_.start_optimize(req.path_params.at("id"), params);
        send_json(res, 202, json{{"job", job}});
      });
    });

    server_.Get("/sessions/:id/export", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const SnapshotPtr snap = store_.get(req.path_params.at("id"));
        const std::string kind = req.has_param("kind") ? req.get_param_value("kind") : "scenario";
        if (kind == "svg") {
          res.set_content(export_svg(*snap), "image/svg+xml");
        } else if (kind == "scenario") {
          res.set_content(export_scenario(*snap), "application/json");
        } else {
          throw InvalidInput("kind must be svg or scenario");
        }
        res.set_header("X-Revision", std::to_string(snap->revision));
        res.status = 200;
      });
    });

    server_.Get("/jobs/:id", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, job_json(store_.job(req.path_params.at("id")))); });
    });

    server_.Post("/jobs/:id/accept", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, snapshot_json(*store_.accept(req.path_params.at("id")))); });
    });

    server_.Post("/jobs/:id/cancel", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string id = req.path_params.at("id");
        store_.cancel(id);
        send_json(res, 200, job_json(store_.job(id)));
      });
    });

    server_.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty()) {
        const std::string code = res.status == 404 ? "not_found" : "http_error";
        res.set_content(json{{"code", code},
                             {"message", httplib::status_message(res.status)},
                             {"detail", json::object()}}
                            .dump(),
                        "application/json");
      }
    });
  }

  SessionStore& store_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace mdp
