#include "elicit/service.hpp"

#include <httplib.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "elicit/analysis.hpp"
#include "elicit/errors.hpp"

namespace elicit {

namespace {

ApiResult error_result(int status, std::string code, const std::string& message,
                       nlohmann::json extra = nlohmann::json::object()) {
  extra["error"] = std::move(code);
  extra["message"] = message;
  return {status, std::move(extra)};
}

std::string expected_type(Phase phase) {
  switch (phase) {
    case Phase::Familiarization:
      return "familiarized";
    case Phase::GroupExtremes:
      return "group_extremes";
    case Phase::AnchorSelection:
      return "anchors";
    case Phase::LikertRating:
      return "rating";
    case Phase::PairwiseComparison:
      return "choice";
    case Phase::Complete:
      break;
  }
  return "";
}

int int_field(const nlohmann::json& body, const char* name) {
  if (!body.contains(name) || !body.at(name).is_number_integer()) {
    throw ContractError(std::string("field '") + name + "' must be an integer");
  }
  return body.at(name).get<int>();
}

nlohmann::json progress_json(const Session& session) {
  if (session.phase() == Phase::Complete) {
    const int total = static_cast<int>(session.state().schedule.trials.size());
    return {{"answered", total}, {"total", total}};
  }
  const auto prompt = session.next_prompt();
  return {{"answered", prompt.answered}, {"total", prompt.total}};
}

std::vector<double> ratings_by_id(const SessionState& state) {
  std::vector<double> before(state.config.catalog.size(), 0.0);
  for (const auto& r : state.ratings) {
    before[static_cast<std::size_t>(r.stimulus_id)] = r.value;
  }
  return before;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

nlohmann::json estimate_json(const StrengthEstimate& estimate,
                             const EstimatorOptions& options) {
  return {{"theta", estimate.theta},
          {"normalized_scores", estimate.normalized_scores},
          {"converged", estimate.converged},
          {"iterations", estimate.iterations},
          {"alpha", options.alpha},
          {"tol", options.tol},
          {"normalize_on", std::string(to_string(options.normalize_on))}};
}

}  // namespace

SessionService::SessionService(AppConfig config,
                               std::unique_ptr<PresenterSink> sink, Clock clock)
    : config_(std::move(config)),
      sink_(sink ? std::move(sink) : std::make_unique<LogSink>()),
      clock_(std::move(clock)),
      sessions_dir_(std::filesystem::path(config_.service.data_dir) / "sessions"),
      id_state_(std::random_device{}() ^
                (static_cast<std::uint64_t>(std::random_device{}()) << 32)) {
  std::filesystem::create_directories(sessions_dir_);
}

std::filesystem::path SessionService::log_path(const std::string& session_id) const {
  return sessions_dir_ / session_id / "events.jsonl";
}

std::size_t SessionService::load_existing() {
  std::size_t restored = 0;
  for (const auto& dir : std::filesystem::directory_iterator(sessions_dir_)) {
    const auto path = dir.path() / "events.jsonl";
    if (!dir.is_directory() || !std::filesystem::exists(path)) continue;
    const auto events = read_event_log(path);
    auto entry = std::make_shared<Entry>();
    entry->session = Session::replay(events, clock_);
    entry->persisted = events.size();
    std::unique_lock lock(sessions_mutex_);
    sessions_[entry->session->state().session_id] = std::move(entry);
    ++restored;
  }
  return restored;
}

std::string SessionService::new_session_id() {
  std::lock_guard lock(id_mutex_);
  while (true) {
    std::mt19937_64 rng(id_state_++ ^ static_cast<std::uint64_t>(clock_()));
    char id[17];
    std::snprintf(id, sizeof id, "%016llx",
                  static_cast<unsigned long long>(rng()));
    std::shared_lock read(sessions_mutex_);
    if (!sessions_.contains(id)) return id;
  }
}

std::shared_ptr<SessionService::Entry> SessionService::find(
    const std::string& session_id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool SessionService::authorized(const std::string& authorization) const {
  const auto& token = config_.service.experimenter_token;
  return !token.empty() && authorization == "Bearer " + token;
}

void SessionService::persist(const std::string& session_id, Entry& entry,
                             Session& candidate) {
  const auto& log = candidate.state().event_log;
  const auto path = log_path(session_id);
  std::filesystem::create_directories(path.parent_path());
  for (std::size_t i = entry.persisted; i < log.size(); ++i) {
    append_event(path, log[i]);
  }
  entry.persisted = log.size();
  entry.session = std::move(candidate);
}

EstimatorOptions SessionService::estimator_for(const Session& session) const {
  EstimatorOptions options = config_.bt;
  options.observer = nullptr;
  if (session.state().config.bt_alpha) {
    options.alpha = *session.state().config.bt_alpha;
  }
  return options;
}

ApiResult SessionService::create_session(const nlohmann::json& body) {
  if (!body.is_object()) {
    return error_result(400, "invalid_config", "body must be a JSON object");
  }
  nlohmann::json field_errors = nlohmann::json::object();
  SessionConfig config;
  config.schedule = config_.schedule;

  if (body.contains("seed")) {
    const auto& seed = body.at("seed");
    if (seed.is_number_unsigned() ||
        (seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
      config.seed = seed.get<std::uint64_t>();
    } else {
      field_errors["seed"] = "must be a non-negative integer";
    }
  } else {
    std::lock_guard lock(id_mutex_);
    config.seed = std::mt19937_64(id_state_++)();
  }
  if (body.contains("catalog") && body.at("catalog") != "default") {
    try {
      if (!body.at("catalog").is_array()) {
        throw ContractError("must be \"default\" or an array of stimuli");
      }
      config.catalog = catalog_from_json(body.at("catalog").dump());
      if (config.catalog.size() != static_cast<std::size_t>(kCatalogSize)) {
        throw ContractError("must contain exactly " +
                            std::to_string(kCatalogSize) + " stimuli");
      }
    } catch (const Error& e) {
      field_errors["catalog"] = e.what();
    }
  }
  if (body.contains("schedule")) {
    const auto& s = body.at("schedule");
    try {
      if (s.contains("repeats_by_gap")) {
        config.schedule.repeats_by_gap = s.at("repeats_by_gap").get<std::vector<int>>();
      }
      if (s.contains("synthetic_weight")) {
        config.schedule.synthetic_weight = s.at("synthetic_weight").get<int>();
      }
      config.schedule.validate();
    } catch (const std::exception& e) {
      field_errors["schedule"] = e.what();
    }
  }
  if (body.contains("bt") && body.at("bt").contains("alpha")) {
    const auto& alpha = body.at("bt").at("alpha");
    if (alpha.is_number() && alpha.get<double>() >= 0.0) {
      config.bt_alpha = alpha.get<double>();
    } else {
      field_errors["bt.alpha"] = "must be a non-negative number";
    }
  }
  if (!field_errors.empty()) {
    return error_result(400, "invalid_config", "invalid session configuration",
                        {{"fields", field_errors}});
  }

  const std::string id = new_session_id();
  auto entry = std::make_shared<Entry>();
  std::optional<Session> session;
  try {
    session = Session::start(id, std::move(config), clock_);
  } catch (const Error& e) {
    return error_result(400, "invalid_config", e.what());
  }
  {
    std::lock_guard lock(entry->mutex);
    persist(id, *entry, *session);
  }
  {
    std::unique_lock lock(sessions_mutex_);
    sessions_[id] = entry;
  }
  return {201, {{"session_id", id},
                {"phase", std::string(to_string(Phase::Familiarization))}}};
}

ApiResult SessionService::get_next(const std::string& session_id) {
  const auto entry = find(session_id);
  if (!entry) return error_result(404, "not_found", "unknown session " + session_id);
  std::lock_guard lock(entry->mutex);
  Session candidate = *entry->session;
  PromptDescriptor prompt;
  try {
    prompt = candidate.next_prompt();
  } catch (const SessionFinished&) {
    return error_result(410, "finished", "session is complete",
                        {{"finished", true}});
  }

  std::vector<PresentCommand> commands;
  const auto sink_name = std::string(sink_->name());
  for (int stimulus_id : prompt.stimuli) {
    candidate.record_presentation(stimulus_id, sink_name);
    commands.push_back({session_id, stimulus_id,
                        "catalog:" + std::to_string(stimulus_id),
                        candidate.state().event_log.back().timestamp_ms,
                        candidate.state().event_log.size() - 1});
  }
  try {
    persist(session_id, *entry, candidate);
  } catch (const std::exception& e) {
    return error_result(500, "persistence_failed", e.what());
  }

  // Presentation is advisory: failures degrade the session, never block it.
  std::vector<std::string> failures;
  {
    std::lock_guard sink_lock(sink_mutex_);
    for (const auto& command : commands) {
      const auto& spec = entry->session->state().config.catalog.at(
          static_cast<std::size_t>(command.stimulus_id));
      const auto status = sink_->dispatch(command, spec);
      if (!status.delivered) failures.push_back(status.detail);
    }
  }
  if (!failures.empty() && !entry->session->presenter_degraded()) {
    Session degraded = *entry->session;
    degraded.record_presenter_degraded(std::string(sink_->name()) + ": " +
                                       failures.front());
    try {
      persist(session_id, *entry, degraded);
    } catch (const std::exception&) {
      // The prompt is still valid; the flag is retried on the next failure.
    }
  }

  auto body = prompt.to_json();
  body["session_id"] = session_id;
  body["presenter_degraded"] = entry->session->presenter_degraded();
  return {200, std::move(body)};
}

ApiResult SessionService::post_response(const std::string& session_id,
                                        const nlohmann::json& body) {
  const auto entry = find(session_id);
  if (!entry) return error_result(404, "not_found", "unknown session " + session_id);
  if (!body.is_object() || !body.contains("type") || !body.at("type").is_string()) {
    return error_result(400, "invalid_response",
                        "response must be an object with a string 'type'");
  }
  std::string key;
  if (body.contains("idempotency_key")) {
    if (!body.at("idempotency_key").is_string()) {
      return error_result(400, "invalid_response",
                          "idempotency_key must be a string");
    }
    key = body.at("idempotency_key").get<std::string>();
  }

  std::lock_guard lock(entry->mutex);
  const Session& current = *entry->session;
  if (!key.empty()) {
    if (const auto index = current.find_idempotency_key(key)) {
      return {200,
              {{"accepted", true},
               {"replayed", true},
               {"event_index", *index},
               {"phase", std::string(to_string(current.phase()))},
               {"progress", progress_json(current)}}};
    }
  }
  if (current.phase() == Phase::Complete) {
    return error_result(410, "finished", "session is complete", {{"finished", true}});
  }

  const auto type = body.at("type").get<std::string>();
  const auto expected_schema = current.next_prompt().to_json().at("response_schema");
  if (type != "replay" && type != expected_type(current.phase())) {
    return error_result(409, "protocol_violation",
                        "response type '" + type + "' does not match phase " +
                            std::string(to_string(current.phase())),
                        {{"expected", expected_schema}});
  }

  Session candidate = current;
  try {
    if (type == "familiarized") {
      candidate.confirm_familiarization(key);
    } else if (type == "group_extremes") {
      candidate.record_group_extremes(int_field(body, "group_index"),
                                      int_field(body, "most_pleasant"),
                                      int_field(body, "most_unpleasant"), key);
    } else if (type == "anchors") {
      candidate.record_anchors(int_field(body, "best"), int_field(body, "worst"), key);
    } else if (type == "rating") {
      candidate.record_rating(int_field(body, "stimulus_id"),
                              int_field(body, "value"), key);
    } else if (type == "choice") {
      candidate.record_choice(int_field(body, "id_a"), int_field(body, "id_b"),
                              int_field(body, "winner"), key);
    } else {
      candidate.record_stimulus_replay(int_field(body, "stimulus_id"), key);
    }
  } catch (const SequencingViolation& e) {
    return error_result(409, "sequencing_violation", e.what(),
                        {{"expected", expected_schema}});
  } catch (const DuplicateResponse& e) {
    return error_result(409, "duplicate_response", e.what());
  } catch (const ProtocolViolation& e) {
    return error_result(409, "protocol_violation", e.what(),
                        {{"expected", expected_schema}});
  } catch (const ContractError& e) {
    return error_result(400, "invalid_response", e.what(),
                        {{"expected", expected_schema}});
  }

  const auto event_index = candidate.state().event_log.size() - 1;
  try {
    persist(session_id, *entry, candidate);
  } catch (const std::exception& e) {
    return error_result(500, "persistence_failed", e.what());
  }
  const Session& updated = *entry->session;
  return {200,
          {{"accepted", true},
           {"replayed", false},
           {"event_index", event_index},
           {"phase", std::string(to_string(updated.phase()))},
           {"progress", progress_json(updated)}}};
}

nlohmann::json SessionService::compute_results(const Session& session) const {
  const auto dataset = session.assemble_dataset();
  const auto options = estimator_for(session);
  const auto estimate = estimate_ilsr(dataset, options);
  if (estimate.normalized_scores.empty()) {
    throw DegenerateScaleError("estimated strengths are all equal");
  }
  const auto result = make_participant_result(
      session.state().session_id, ratings_by_id(session.state()),
      estimate.normalized_scores);
  const auto counts = session.state().schedule.counts();
  const auto observed = dataset.count(Provenance::Observed);
  return {{"session_id", session.state().session_id},
          {"estimate", estimate_json(estimate, options)},
          {"participant",
           {{"before", result.before},
            {"after", result.after},
            {"r", result.r},
            {"mad", result.mad}}},
          {"metadata",
           {{"observed_outcomes", observed},
            {"synthetic_outcomes", dataset.count(Provenance::Synthetic)},
            {"synthetic_only", observed == 0},
            {"regularized", options.alpha > 0.0},
            {"pairs_twice", counts.twice},
            {"pairs_once", counts.once},
            {"pairs_omitted", counts.omitted},
            {"total_trials", counts.total_trials},
            {"event_log_hash", fnv1a_hex(to_jsonl(session.state().event_log))}}}};
}

ApiResult SessionService::get_results(const std::string& session_id) {
  const auto entry = find(session_id);
  if (!entry) return error_result(404, "not_found", "unknown session " + session_id);
  std::lock_guard lock(entry->mutex);
  const Session& session = *entry->session;
  if (session.phase() != Phase::Complete) {
    nlohmann::json extra = {{"phase", std::string(to_string(session.phase()))}};
    if (const auto remaining = session.remaining_trials()) {
      extra["remaining_trials"] = *remaining;
    }
    return error_result(409, "incomplete", "session is not complete", extra);
  }
  const auto hash = fnv1a_hex(to_jsonl(session.state().event_log));
  if (entry->results_cache && entry->results_cache->first == hash) {
    return {200, entry->results_cache->second};
  }
  try {
    auto body = compute_results(session);
    entry->results_cache.emplace(hash, body);
    return {200, std::move(body)};
  } catch (const NonIdentifiableError& e) {
    return error_result(422, "non_identifiable", e.what());
  } catch (const DegenerateScaleError& e) {
    return error_result(422, "degenerate_scale", e.what());
  }
}

ApiResult SessionService::catalog() const {
  return {200, nlohmann::json::parse(catalog_to_json(default_catalog()))};
}

ApiResult SessionService::healthz() const {
  std::shared_lock lock(sessions_mutex_);
  return {200, {{"status", "ok"}, {"sessions", sessions_.size()},
                {"presenter", std::string(sink_->name())}}};
}

ApiResult SessionService::export_bundle(const std::string& session_id,
                                        const std::string& authorization) {
  if (!authorized(authorization)) {
    return error_result(401, "unauthorized", "experimenter token required");
  }
  const auto entry = find(session_id);
  if (!entry) return error_result(404, "not_found", "unknown session " + session_id);
  std::lock_guard lock(entry->mutex);
  const Session& session = *entry->session;
  const auto& state = session.state();

  const auto dir = std::filesystem::path(config_.service.data_dir) / "exports" / session_id;
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  const auto put = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    files.push_back(name);
  };
  put("events.jsonl", to_jsonl(state.event_log));
  put("ratings.csv", ratings_to_csv(state.ratings));
  put("schedule.csv", schedule_to_csv(state.schedule, state.choices));
  put("omitted.csv", omitted_to_csv(state.schedule));
  nlohmann::json body = {{"session_id", session_id},
                         {"phase", std::string(to_string(state.phase))},
                         {"path", dir.string()}};
  if (session.phase() == Phase::Complete) {
    try {
      const auto dataset = session.assemble_dataset();
      const auto options = estimator_for(session);
      const auto estimate = estimate_ilsr(dataset, options);
      put("dataset.csv", dataset_to_csv(dataset));
      put("estimate.csv", estimate_to_csv(estimate, options));
      if (!estimate.normalized_scores.empty()) {
        const std::vector<ParticipantResult> results{make_participant_result(
            session_id, ratings_by_id(state), estimate.normalized_scores)};
        for (const auto& [name, content] : report(results, ReportFormat::Csv).files) {
          put("report_" + name, content);
        }
      }
    } catch (const Error& e) {
      body["estimate_error"] = e.what();
    }
  }
  body["files"] = files;
  body["schedule"] = {{"trials", nlohmann::json::array()},
                      {"omitted", nlohmann::json::array()}};
  for (const auto& t : state.schedule.trials) {
    body["schedule"]["trials"].push_back({t.id_a, t.id_b});
  }
  for (const auto& o : state.schedule.omitted) {
    body["schedule"]["omitted"].push_back({o.id_a, o.id_b, o.implied_winner});
  }
  return {200, std::move(body)};
}

ApiResult SessionService::list_sessions(const std::string& authorization) {
  if (!authorized(authorization)) {
    return error_result(401, "unauthorized", "experimenter token required");
  }
  std::vector<std::pair<std::string, std::shared_ptr<Entry>>> entries;
  {
    std::shared_lock lock(sessions_mutex_);
    entries.assign(sessions_.begin(), sessions_.end());
  }
  nlohmann::json list = nlohmann::json::array();
  for (const auto& [id, entry] : entries) {
    std::lock_guard lock(entry->mutex);
    list.push_back({{"session_id", id},
                    {"phase", std::string(to_string(entry->session->phase()))},
                    {"progress", progress_json(*entry->session)},
                    {"presenter_degraded", entry->session->presenter_degraded()}});
  }
  return {200, {{"sessions", list}}};
}

ApiResult SessionService::aggregate(const std::string& authorization) {
  if (!authorized(authorization)) {
    return error_result(401, "unauthorized", "experimenter token required");
  }
  std::vector<std::pair<std::string, std::shared_ptr<Entry>>> entries;
  {
    std::shared_lock lock(sessions_mutex_);
    entries.assign(sessions_.begin(), sessions_.end());
  }
  std::vector<ParticipantResult> results;
  for (const auto& [id, entry] : entries) {
    std::lock_guard lock(entry->mutex);
    if (entry->session->phase() != Phase::Complete) continue;
    try {
      const auto estimate =
          estimate_ilsr(entry->session->assemble_dataset(), estimator_for(*entry->session));
      if (estimate.normalized_scores.empty()) continue;
      results.push_back(make_participant_result(
          id, ratings_by_id(entry->session->state()), estimate.normalized_scores));
    } catch (const Error&) {
      continue;
    }
  }
  nlohmann::json participants = nlohmann::json::array();
  for (const auto& r : results) {
    participants.push_back({{"participant_id", r.participant_id},
                            {"r", r.r},
                            {"mad", r.mad},
                            {"before", r.before},
                            {"after", r.after}});
  }
  nlohmann::json stimuli = nlohmann::json::array();
  if (!results.empty()) {
    const auto stats = aggregate_stats(results);
    for (std::size_t s = 0; s < stats.size(); ++s) {
      stimuli.push_back({{"stimulus_id", s},
                         {"mean", stats[s].mean},
                         {"sd", stats[s].sd ? nlohmann::json(*stats[s].sd)
                                            : nlohmann::json(nullptr)}});
    }
  }
  return {200, {{"participants", participants}, {"stimulus_stats", stimuli}}};
}

ApiResult SessionService::debug_estimate(const std::string& session_id,
                                         const std::string& authorization) {
  if (!authorized(authorization)) {
    return error_result(401, "unauthorized", "experimenter token required");
  }
  const auto entry = find(session_id);
  if (!entry) return error_result(404, "not_found", "unknown session " + session_id);
  std::lock_guard lock(entry->mutex);
  const auto& state = entry->session->state();
  if (state.phase < Phase::PairwiseComparison) {
    return error_result(409, "incomplete", "no comparison schedule yet");
  }
  // Answered trials plus synthetic outcomes; unanswered trials are ignored.
  ComparisonDataset dataset(static_cast<int>(state.config.catalog.size()));
  for (const auto& c : state.choices) {
    dataset.add(c.winner, c.winner == c.id_a ? c.id_b : c.id_a);
  }
  for (const auto& o : state.schedule.omitted) {
    dataset.add(o.implied_winner, o.implied_winner == o.id_a ? o.id_b : o.id_a,
                Provenance::Synthetic, state.config.schedule.synthetic_weight);
  }
  const auto options = estimator_for(*entry->session);
  try {
    const auto estimate = estimate_ilsr(dataset, options);
    return {200, {{"session_id", session_id},
                  {"partial", state.phase != Phase::Complete},
                  {"answered_trials", state.choices.size()},
                  {"estimate", estimate_json(estimate, options)}}};
  } catch (const NonIdentifiableError& e) {
    return error_result(422, "non_identifiable", e.what());
  }
}

std::optional<SessionState> SessionService::snapshot(
    const std::string& session_id) const {
  const auto entry = find(session_id);
  if (!entry) return std::nullopt;
  std::lock_guard lock(entry->mutex);
  return entry->session->state();
}

void mount_routes(httplib::Server& server, SessionService& service) {
  const auto reply = [](httplib::Response& res, const ApiResult& result) {
    res.status = result.status;
    res.set_content(result.body.dump(), "application/json");
  };
  const auto parse_body = [](const httplib::Request& req,
                             nlohmann::json& out) -> bool {
    if (req.body.empty()) {
      out = nlohmann::json::object();
      return true;
    }
    try {
      out = nlohmann::json::parse(req.body);
      return true;
    } catch (const nlohmann::json::exception&) {
      return false;
    }
  };
  const auto bad_json = error_result(400, "invalid_json", "body is not valid JSON");

  server.Post("/api/sessions", [&, reply, parse_body, bad_json](
                                   const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    if (!parse_body(req, body)) return reply(res, bad_json);
    reply(res, service.create_session(body));
  });
  server.Get(R"(/api/sessions/([0-9A-Za-z_-]+)/next)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_next(req.matches[1]));
             });
  server.Post(R"(/api/sessions/([0-9A-Za-z_-]+)/response)",
              [&, reply, parse_body, bad_json](const httplib::Request& req,
                                               httplib::Response& res) {
                nlohmann::json body;
                if (!parse_body(req, body)) return reply(res, bad_json);
                reply(res, service.post_response(req.matches[1], body));
              });
  server.Get(R"(/api/sessions/([0-9A-Za-z_-]+)/results)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_results(req.matches[1]));
             });
  server.Get(R"(/api/sessions/([0-9A-Za-z_-]+)/export)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.export_bundle(req.matches[1],
                                                req.get_header_value("Authorization")));
             });
  server.Get("/api/experimenter/sessions",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.list_sessions(req.get_header_value("Authorization")));
             });
  server.Get("/api/experimenter/aggregate",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.aggregate(req.get_header_value("Authorization")));
             });
  server.Get(R"(/api/experimenter/sessions/([0-9A-Za-z_-]+)/partial-estimate)",
             [&, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.debug_estimate(req.matches[1],
                                                 req.get_header_value("Authorization")));
             });
  server.Get("/api/catalog", [&, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.catalog());
  });
  server.Get("/api/healthz", [&, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.healthz());
  });
  if (!service.config().service.static_dir.empty()) {
    server.set_mount_point("/", service.config().service.static_dir);
  }
}

}  // namespace elicit
