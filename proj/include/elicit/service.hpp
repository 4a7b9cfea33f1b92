#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "elicit/config.hpp"
#include "elicit/presenter.hpp"
#include "elicit/protocol.hpp"

namespace httplib {
class Server;
}

namespace elicit {

/// HTTP-shaped outcome of a service call: status code plus JSON body.
struct ApiResult {
  int status = 200;
  nlohmann::json body;
};

/// Owns all sessions. Each session is persisted as
/// <data_dir>/sessions/<id>/events.jsonl and every accepted response is on
/// disk before it is acknowledged.
///
/// Participant-facing calls (create_session, get_next, post_response,
/// get_results, catalog) never return the schedule or implied winners;
/// those are only reachable through the token-gated experimenter calls.
class SessionService {
 public:
  SessionService(AppConfig config, std::unique_ptr<PresenterSink> sink,
                 Clock clock = system_clock_ms);

  /// Replays every session log found under the data directory. Returns the
  /// number of sessions restored.
  std::size_t load_existing();

  ApiResult create_session(const nlohmann::json& body);
  ApiResult get_next(const std::string& session_id);
  ApiResult post_response(const std::string& session_id,
                          const nlohmann::json& body);
  ApiResult get_results(const std::string& session_id);
  ApiResult catalog() const;
  ApiResult healthz() const;

  // Experimenter routes; `authorization` is the raw Authorization header.
  ApiResult export_bundle(const std::string& session_id,
                          const std::string& authorization);
  ApiResult list_sessions(const std::string& authorization);
  ApiResult debug_estimate(const std::string& session_id,
                           const std::string& authorization);
  ApiResult aggregate(const std::string& authorization);

  std::optional<SessionState> snapshot(const std::string& session_id) const;
  std::filesystem::path log_path(const std::string& session_id) const;
  const AppConfig& config() const { return config_; }

 private:
  struct Entry {
    std::mutex mutex;
    std::optional<Session> session;
    std::size_t persisted = 0;
    std::optional<std::pair<std::string, nlohmann::json>> results_cache;
  };

  std::shared_ptr<Entry> find(const std::string& session_id) const;
  bool authorized(const std::string& authorization) const;
  void persist(const std::string& session_id, Entry& entry, Session& candidate);
  nlohmann::json compute_results(const Session& session) const;
  EstimatorOptions estimator_for(const Session& session) const;
  std::string new_session_id();

  AppConfig config_;
  std::unique_ptr<PresenterSink> sink_;
  std::mutex sink_mutex_;
  Clock clock_;
  std::filesystem::path sessions_dir_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
};

/// Routes:
///   POST /api/sessions                GET /api/sessions/{id}/next
///   POST /api/sessions/{id}/response  GET /api/sessions/{id}/results
///   GET  /api/catalog                 GET /api/healthz
///   GET  /api/sessions/{id}/export          (experimenter)
///   GET  /api/experimenter/sessions         (experimenter)
///   GET  /api/experimenter/aggregate        (experimenter)
///   GET  /api/experimenter/sessions/{id}/partial-estimate (experimenter)
void mount_routes(httplib::Server& server, SessionService& service);

}  // namespace elicit
