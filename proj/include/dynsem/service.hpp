// Copyright 2026 The dynsem Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Session service for interactive training.
//
// SessionService holds in-memory engine sessions and speaks JSON; HttpServer
// exposes it over HTTP:
//
//   POST   /sessions                       create a session
//   POST   /sessions/{id}/utterances       {"text": "..."} or {"silence": true}
//   GET    /sessions/{id}/state
//   GET    /sessions/{id}/lexicon
//   GET    /sessions/{id}/history
//   GET    /sessions/{id}/lexicon/export   lexicon document as a download
//   PUT    /sessions/{id}/lexicon          replace the lexicon from a document
//   DELETE /sessions/{id}
//
// Errors are {"error": {"code": ..., "message": ...}}. A step posted while
// another step on the same session is running is rejected with 409 and
// "retry": true.

#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "dynsem/engine.hpp"
#include "dynsem/persistence.hpp"
#include "dynsem/selectors.hpp"
#include "dynsem/semantics.hpp"

namespace dynsem {

struct ServiceResponse {
  int status = 200;
  Json body;
};

inline ServiceResponse service_error(int status, std::string_view code,
                                     const std::string& message,
                                     bool retry = false) {
  Json err = {{"code", code}, {"message", message}};
  if (retry) err["retry"] = true;
  return {status, Json{{"error", std::move(err)}}};
}

inline Json pair_to_json(const AcPair& p, const ActionSpace& space) {
  return {{"a", space.label(p.antecedent)}, {"c", space.label(p.consequent)}};
}

/// Wire form of a StepReport, plus the session's new current state.
inline Json step_report_to_json(const StepReport& r, const ActionSpace& space) {
  Json entries = Json::array();
  for (std::size_t i = 0; i < r.appended.size(); ++i)
    entries.push_back(entry_to_json(
        r.appended[i], i == 0 ? std::optional<std::size_t>(r.k) : std::nullopt,
        space));
  Json changes = Json::array();
  for (const auto& c : r.lexicon_changes)
    changes.push_back(
        {{"utterance", c.utterance.text()},
         {"before", c.before ? pair_to_json(*c.before, space) : Json(nullptr)},
         {"after", pair_to_json(c.after, space)}});
  return {{"k", r.k},
          {"utterance", r.utterance.text()},
          {"silence", r.utterance.is_silence()},
          {"antecedent", space.label(r.antecedent)},
          {"consequent", space.label(r.consequent)},
          {"rule", std::string(to_string(r.rule))},
          {"entries", std::move(entries)},
          {"lexicon_changes", std::move(changes)},
          {"state", space.label(r.consequent)}};
}

class SessionService {
public:
  /// config: {"states": [...], "initial": "...", "selector": "cyclic",
  ///          "lexicon": <optional lexicon document>}
  ServiceResponse create_session(const Json& config) {
    try {
      if (!config.is_object())
        return service_error(400, "bad_request", "config must be an object");
      auto engine = engine_from_config(config);
      auto slot = std::make_shared<Slot>(std::move(engine), config);
      const std::string id = "s" + std::to_string(++counter_);
      Json body = state_body(id, slot->engine);
      {
        std::unique_lock lock(mu_);
        sessions_.emplace(id, std::move(slot));
      }
      return {201, std::move(body)};
    } catch (const Error& e) {
      return service_error(422, "invalid_config", e.what());
    } catch (const Json::exception& e) {
      return service_error(400, "bad_request", e.what());
    }
  }

  ServiceResponse post_utterance(const std::string& id, const Json& body) {
    auto slot = find(id);
    if (!slot) return unknown(id);

    Utterance u;
    if (!body.is_object())
      return service_error(400, "bad_request", "body must be an object");
    const bool silence =
        body.contains("silence") && body["silence"].is_boolean() &&
        body["silence"].get<bool>();
    if (silence) {
      if (body.contains("text") && body["text"].is_string() &&
          !detail::trim(body["text"].get<std::string>()).empty())
        return service_error(400, "bad_request",
                             "a request cannot carry both text and silence");
    } else {
      if (!body.contains("text") || !body["text"].is_string())
        return service_error(400, "bad_request",
                             "expected {\"text\": ...} or {\"silence\": true}");
      try {
        u = Utterance(body["text"].get<std::string>());
      } catch (const InvariantError& e) {
        return service_error(400, "bad_request", e.what());
      }
      if (u.is_silence())
        return service_error(400, "bad_request",
                             "empty text; send {\"silence\": true} for silence");
    }

    std::unique_lock lock(slot->mu, std::try_to_lock);
    if (!lock.owns_lock())
      return service_error(409, "busy",
                           "another step is in progress on session " + id,
                           true);
    try {
      const auto report = slot->engine.step(u);
      return {200, step_report_to_json(report, slot->engine.space())};
    } catch (const Error& e) {
      return service_error(422, "engine_error", e.what());
    }
  }

  ServiceResponse get_state(const std::string& id) {
    auto slot = find(id);
    if (!slot) return unknown(id);
    std::lock_guard lock(slot->mu);
    return {200, state_body(id, slot->engine)};
  }

  ServiceResponse get_lexicon(const std::string& id) {
    auto slot = find(id);
    if (!slot) return unknown(id);
    std::lock_guard lock(slot->mu);
    return {200,
            lexicon_to_json(slot->engine.lexicon(), slot->engine.space())};
  }

  ServiceResponse get_history(const std::string& id) {
    auto slot = find(id);
    if (!slot) return unknown(id);
    std::lock_guard lock(slot->mu);
    const auto& e = slot->engine;
    return {200, Json{{"version", kFormatVersion},
                      {"states", states_to_json(e.space())},
                      {"history", history_entries_to_json(e.history(), e.space())}}};
  }

  /// Replaces the session's lexicon. The document must declare the same
  /// states; the history starts over and the current state is kept.
  ServiceResponse import_lexicon(const std::string& id, const Json& doc) {
    auto slot = find(id);
    if (!slot) return unknown(id);
    LexiconDocument parsed;
    try {
      parsed = lexicon_from_json(doc);
    } catch (const PersistenceError& e) {
      return service_error(422, "invalid_document", e.what());
    }
    std::unique_lock lock(slot->mu, std::try_to_lock);
    if (!lock.owns_lock())
      return service_error(409, "busy",
                           "another step is in progress on session " + id,
                           true);
    auto& engine = slot->engine;
    if (!(parsed.space == engine.space()))
      return service_error(422, "invalid_document",
                           "document states differ from the session's states");
    engine = EngineSession(engine.space(), engine.current(),
                           engine.selector_spec(), std::move(parsed.lexicon));
    return {200, state_body(id, engine)};
  }

  ServiceResponse delete_session(const std::string& id) {
    std::unique_lock lock(mu_);
    if (sessions_.erase(id) == 0) return unknown(id);
    return {200, Json{{"session", id}, {"deleted", true}}};
  }

  std::size_t session_count() const {
    std::shared_lock lock(mu_);
    return sessions_.size();
  }

private:
  struct Slot {
    Slot(EngineSession e, Json c) : engine(std::move(e)), config(std::move(c)) {}
    std::mutex mu;
    EngineSession engine;
    Json config;
  };

  static EngineSession engine_from_config(const Json& config) {
    std::vector<std::string> labels = config.at("states").get<std::vector<std::string>>();
    ActionSpace space(std::move(labels));
    const auto initial = config.at("initial").get<std::string>();
    const auto selector = config.contains("selector")
                              ? SelectorSpec::parse(config["selector"].get<std::string>())
                              : SelectorSpec::cyclic();
    Lexicon lexicon;
    if (config.contains("lexicon")) {
      auto doc = lexicon_from_json(config["lexicon"]);
      if (!(doc.space == space))
        throw InvariantError("lexicon document states differ from session states");
      lexicon = std::move(doc.lexicon);
    }
    return EngineSession(space, space.state(initial), selector, std::move(lexicon));
  }

  static Json state_body(const std::string& id, const EngineSession& e) {
    return {{"session", id},
            {"state", e.space().label(e.current())},
            {"k", e.iteration()},
            {"states", states_to_json(e.space())},
            {"selector", e.selector_spec().to_string()}};
  }

  static ServiceResponse unknown(const std::string& id) {
    return service_error(404, "unknown_session", "no session '" + id + "'");
  }

  std::shared_ptr<Slot> find(const std::string& id) const {
    std::shared_lock lock(mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
  }

  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
  std::atomic<std::uint64_t> counter_{0};
};

/// HTTP front end for a SessionService.
class HttpServer {
public:
  explicit HttpServer(SessionService& service) : service_(service) {
    // SO_REUSEADDR only: a port held by another server must fail to bind.
    server_.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                 reinterpret_cast<const char*>(&yes), sizeof(yes));
    });
    server_.set_default_headers(
        {{"Access-Control-Allow-Origin", "*"},
         {"Access-Control-Allow-Headers", "Content-Type"},
         {"Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS"}});
    server_.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
      res.status = 204;
    });

    server_.Post("/sessions", [this](const httplib::Request& req,
                                     httplib::Response& res) {
      with_body(req, res, [&](const Json& body) {
        return service_.create_session(body);
      });
    });
    server_.Post("/sessions/:id/utterances",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   with_body(req, res, [&](const Json& body) {
                     return service_.post_utterance(req.path_params.at("id"), body);
                   });
                 });
    server_.Get("/sessions/:id/state",
                [this](const httplib::Request& req, httplib::Response& res) {
                  write(res, service_.get_state(req.path_params.at("id")));
                });
    server_.Get("/sessions/:id/lexicon",
                [this](const httplib::Request& req, httplib::Response& res) {
                  write(res, service_.get_lexicon(req.path_params.at("id")));
                });
    server_.Get("/sessions/:id/lexicon/export",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const auto& id = req.path_params.at("id");
                  write(res, service_.get_lexicon(id));
                  if (res.status == 200)
                    res.set_header("Content-Disposition",
                                   "attachment; filename=\"" + id + ".lex\"");
                });
    server_.Put("/sessions/:id/lexicon",
                [this](const httplib::Request& req, httplib::Response& res) {
                  with_body(req, res, [&](const Json& body) {
                    return service_.import_lexicon(req.path_params.at("id"), body);
                  });
                });
    server_.Get("/sessions/:id/history",
                [this](const httplib::Request& req, httplib::Response& res) {
                  write(res, service_.get_history(req.path_params.at("id")));
                });
    server_.Delete("/sessions/:id",
                   [this](const httplib::Request& req, httplib::Response& res) {
                     write(res, service_.delete_session(req.path_params.at("id")));
                   });
  }

  /// Binds to host:port (port 0 picks a free port). Returns the bound port,
  /// or -1 if binding failed.
  int bind(const std::string& host, int port) {
    if (port == 0) return port_ = server_.bind_to_any_port(host);
    return port_ = server_.bind_to_port(host, port) ? port : -1;
  }

  /// Serves until stop() is called.
  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() const { server_.wait_until_ready(); }
  int port() const { return port_; }

private:
  static void write(httplib::Response& res, const ServiceResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump() + "\n", "application/json");
  }

  template <typename Handler>
  static void with_body(const httplib::Request& req, httplib::Response& res,
                        Handler&& handler) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      write(res, service_error(400, "bad_request", e.what()));
      return;
    }
    write(res, handler(body));
  }

  SessionService& service_;
  httplib::Server server_;
  int port_ = -1;
};

}  // namespace dynsem
