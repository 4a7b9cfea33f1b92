#include "elicit/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "elicit/csv.hpp"
#include "elicit/errors.hpp"
#include "elicit/random.hpp"

namespace elicit {

namespace {

// Sub-streams of the session seed.
constexpr std::uint64_t kFamiliarizationStream = 1;
constexpr std::uint64_t kGroupStream = 2;
constexpr std::uint64_t kRatingOrderStream = 3;
constexpr std::uint64_t kScheduleStream = 4;

constexpr const char* kStart = "session_start";
constexpr const char* kFamiliarized = "familiarization_confirmed";
constexpr const char* kGroupExtremes = "group_extremes";
constexpr const char* kAnchors = "anchors";
constexpr const char* kRating = "rating";
constexpr const char* kChoice = "choice";
constexpr const char* kStimulusReplay = "stimulus_replay";
constexpr const char* kPresent = "present";
constexpr const char* kDegraded = "presenter_degraded";

bool contains(const std::vector<int>& values, int value) {
  return std::find(values.begin(), values.end(), value) != values.end();
}

std::vector<int> shuffled_ids(int n, std::uint64_t seed) {
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  seeded_shuffle(std::span<int>(ids), rng);
  return ids;
}

nlohmann::json rule_json(const ScheduleRule& rule) {
  return {{"repeats_by_gap", rule.repeats_by_gap},
          {"synthetic_weight", rule.synthetic_weight}};
}

ScheduleRule rule_from_json(const nlohmann::json& j) {
  ScheduleRule rule;
  rule.repeats_by_gap = j.at("repeats_by_gap").get<std::vector<int>>();
  rule.synthetic_weight = j.at("synthetic_weight").get<int>();
  return rule;
}

void validate_catalog(const std::vector<StimulusSpec>& catalog) {
  if (catalog.size() != static_cast<std::size_t>(kCatalogSize)) {
    throw ConfigError("catalog must contain exactly " +
                      std::to_string(kCatalogSize) + " stimuli, got " +
                      std::to_string(catalog.size()));
  }
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (catalog[i].id != static_cast<int>(i)) {
      throw ConfigError("catalog ids must be 0.." +
                        std::to_string(kCatalogSize - 1) + " in order");
    }
    try {
      validate(catalog[i]);
    } catch (const ContractError& e) {
      throw ConfigError(e.what());
    }
  }
}

nlohmann::json response_schema(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::ConfirmFamiliarization:
      return {{"type", "familiarized"}, {"fields", nlohmann::json::array()}};
    case ResponseKind::PickGroupExtremes:
      return {{"type", "group_extremes"},
              {"fields", {"group_index", "most_pleasant", "most_unpleasant"}}};
    case ResponseKind::PickAnchors:
      return {{"type", "anchors"}, {"fields", {"best", "worst"}}};
    case ResponseKind::IntegerRating:
      return {{"type", "rating"},
              {"fields", {"stimulus_id", "value"}},
              {"min", kRatingMin},
              {"max", kRatingMax}};
    case ResponseKind::ForcedChoice:
      return {{"type", "choice"}, {"fields", {"id_a", "id_b", "winner"}}};
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Familiarization:
      return "familiarization";
    case Phase::GroupExtremes:
      return "group_extremes";
    case Phase::AnchorSelection:
      return "anchor_selection";
    case Phase::LikertRating:
      return "likert_rating";
    case Phase::PairwiseComparison:
      return "pairwise_comparison";
    case Phase::Complete:
      return "complete";
  }
  return "unknown";
}

std::string_view to_string(ResponseKind kind) {
  switch (kind) {
    case ResponseKind::ConfirmFamiliarization:
      return "confirm_familiarization";
    case ResponseKind::PickGroupExtremes:
      return "pick_group_extremes";
    case ResponseKind::PickAnchors:
      return "pick_anchors";
    case ResponseKind::IntegerRating:
      return "integer_rating";
    case ResponseKind::ForcedChoice:
      return "forced_choice";
  }
  return "unknown";
}

int ScheduleRule::repeats_for_gap(int gap) const {
  const auto index = static_cast<std::size_t>(std::abs(gap));
  return index < repeats_by_gap.size() ? repeats_by_gap[index] : 0;
}

void ScheduleRule::validate() const {
  if (repeats_by_gap.empty() || repeats_by_gap.front() < 1) {
    // Equal ratings imply no winner, so they must be compared.
    throw ConfigError("schedule: pairs with equal ratings need >= 1 repeat");
  }
  for (int repeats : repeats_by_gap) {
    if (repeats < 0) throw ConfigError("schedule: repeats must be >= 0");
  }
  if (synthetic_weight < 1) {
    throw ConfigError("schedule: synthetic_weight must be >= 1");
  }
}

PairCounts ComparisonSchedule::counts() const {
  std::map<std::pair<int, int>, int> multiplicity;
  for (const auto& trial : trials) {
    ++multiplicity[{std::min(trial.id_a, trial.id_b),
                    std::max(trial.id_a, trial.id_b)}];
  }
  PairCounts counts;
  for (const auto& [pair, times] : multiplicity) {
    if (times == 2) {
      ++counts.twice;
    } else if (times == 1) {
      ++counts.once;
    } else {
      ++counts.other;
    }
  }
  counts.omitted = static_cast<int>(omitted.size());
  counts.total_trials = static_cast<int>(trials.size());
  return counts;
}

ComparisonSchedule build_schedule(std::span<const LikertRating> ratings,
                                  std::uint64_t seed,
                                  const ScheduleRule& rule) {
  rule.validate();
  const auto n = ratings.size();
  std::vector<std::optional<int>> by_id(n);
  for (const auto& r : ratings) {
    if (r.stimulus_id < 0 || static_cast<std::size_t>(r.stimulus_id) >= n) {
      throw ContractError("rating for unknown stimulus " +
                          std::to_string(r.stimulus_id));
    }
    if (r.value < kRatingMin || r.value > kRatingMax) {
      throw ContractError("rating value out of range");
    }
    auto& slot = by_id[static_cast<std::size_t>(r.stimulus_id)];
    if (slot) {
      throw ContractError("stimulus " + std::to_string(r.stimulus_id) +
                          " rated twice");
    }
    slot = r.value;
  }
  if (n < 2) throw ContractError("schedule needs at least two ratings");

  ComparisonSchedule schedule;
  schedule.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int a = static_cast<int>(i);
      const int b = static_cast<int>(j);
      const int gap = *by_id[i] - *by_id[j];
      const int repeats = rule.repeats_for_gap(gap);
      if (repeats > 0) {
        for (int k = 0; k < repeats; ++k) schedule.trials.push_back({a, b, 0});
      } else {
        schedule.omitted.push_back({a, b, gap > 0 ? a : b});
      }
    }
  }

  std::mt19937_64 rng(seed);
  seeded_shuffle(std::span<ScheduledTrial>(schedule.trials), rng);
  std::map<std::pair<int, int>, int> seen;
  for (auto& trial : schedule.trials) {
    trial.repetition = seen[{trial.id_a, trial.id_b}]++;
    if (uniform_below(rng, 2) == 1) std::swap(trial.id_a, trial.id_b);
  }
  return schedule;
}

nlohmann::json to_json(const SessionState& state) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& group : state.groups) groups.push_back(group);
  nlohmann::json picks = nlohmann::json::array();
  for (const auto& pick : state.group_picks) {
    picks.push_back(pick ? nlohmann::json{pick->most_pleasant,
                                          pick->most_unpleasant}
                         : nlohmann::json(nullptr));
  }
  nlohmann::json ratings = nlohmann::json::array();
  for (const auto& r : state.ratings) {
    ratings.push_back({r.stimulus_id, r.value, r.is_anchor});
  }
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& t : state.schedule.trials) {
    trials.push_back({t.id_a, t.id_b, t.repetition});
  }
  nlohmann::json omitted = nlohmann::json::array();
  for (const auto& o : state.schedule.omitted) {
    omitted.push_back({o.id_a, o.id_b, o.implied_winner});
  }
  nlohmann::json choices = nlohmann::json::array();
  for (const auto& c : state.choices) {
    choices.push_back({c.trial_index, c.id_a, c.id_b, c.winner});
  }
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : state.event_log) {
    events.push_back(nlohmann::json::parse(to_line(e)));
  }
  return {
      {"session_id", state.session_id},
      {"phase", std::string(to_string(state.phase))},
      {"seed", state.config.seed},
      {"catalog", nlohmann::json::parse(catalog_to_json(state.config.catalog))},
      {"schedule_rule", rule_json(state.config.schedule)},
      {"bt_alpha", state.config.bt_alpha ? nlohmann::json(*state.config.bt_alpha)
                                         : nlohmann::json(nullptr)},
      {"familiarization_order", state.familiarization_order},
      {"groups", groups},
      {"group_picks", picks},
      {"pleasant_candidates", state.pleasant_candidates},
      {"unpleasant_candidates", state.unpleasant_candidates},
      {"anchors", state.anchors ? nlohmann::json{state.anchors->first,
                                                 state.anchors->second}
                                : nlohmann::json(nullptr)},
      {"rating_order", state.rating_order},
      {"ratings", ratings},
      {"schedule",
       {{"seed", state.schedule.seed}, {"trials", trials}, {"omitted", omitted}}},
      {"choices", choices},
      {"event_log", events},
  };
}

std::string state_hash(const SessionState& state) {
  return fnv1a_hex(to_json(state).dump());
}

nlohmann::json PromptDescriptor::to_json() const {
  nlohmann::json j = {{"phase", std::string(elicit::to_string(phase))},
                      {"response_kind", std::string(elicit::to_string(response))},
                      {"response_schema", response_schema(response)},
                      {"stimuli", stimuli},
                      {"progress", {{"answered", answered}, {"total", total}}}};
  if (group_index) j["group_index"] = *group_index;
  if (response == ResponseKind::PickAnchors) {
    j["pleasant_candidates"] = pleasant_candidates;
    j["unpleasant_candidates"] = unpleasant_candidates;
  }
  if (anchors) {
    j["anchors"] = {{"plus3", anchors->first}, {"minus3", anchors->second}};
  }
  if (trial_index) j["trial_index"] = *trial_index;
  return j;
}

std::int64_t system_clock_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

Session Session::start(std::string session_id, SessionConfig config,
                       Clock clock) {
  validate_catalog(config.catalog);
  config.schedule.validate();
  SessionState empty;
  empty.session_id = std::move(session_id);
  Session session(std::move(empty), std::move(clock));
  nlohmann::json payload = {
      {"seed", config.seed},
      {"catalog", nlohmann::json::parse(catalog_to_json(config.catalog))},
      {"schedule_rule", rule_json(config.schedule)}};
  if (config.bt_alpha) {
    if (!(*config.bt_alpha >= 0.0)) throw ConfigError("bt alpha must be >= 0");
    payload["bt_alpha"] = *config.bt_alpha;
  }
  session.append(kStart, std::move(payload), {});
  return session;
}

Session Session::replay(std::span<const Event> log, Clock clock) {
  if (log.empty() || log.front().event_type != kStart) {
    throw ContractError("event log must begin with " + std::string(kStart));
  }
  SessionState empty;
  empty.session_id = log.front().session_id;
  Session session(std::move(empty), std::move(clock));
  for (const auto& event : log) {
    if (event.session_id != session.state_.session_id) {
      throw ContractError("event log mixes sessions");
    }
    session.apply(event);
    if (event.payload.contains("idempotency_key")) {
      session.idempotency_index_.emplace(
          event.payload.at("idempotency_key").get<std::string>(),
          session.state_.event_log.size());
    }
    session.state_.event_log.push_back(event);
  }
  return session;
}

void Session::append(std::string event_type, nlohmann::json payload,
                     std::string_view idempotency_key) {
  if (!idempotency_key.empty()) {
    if (idempotency_index_.contains(idempotency_key)) {
      throw DuplicateResponse("idempotency key already used");
    }
    payload["idempotency_key"] = std::string(idempotency_key);
  }
  Event event{clock_(), state_.session_id, std::move(event_type),
              std::move(payload)};
  apply(event);
  if (!idempotency_key.empty()) {
    idempotency_index_.emplace(std::string(idempotency_key),
                               state_.event_log.size());
  }
  state_.event_log.push_back(std::move(event));
}

void Session::apply(const Event& event) {
  const auto& p = event.payload;
  const auto& type = event.event_type;
  try {
    if (type == kStart) {
      apply_start(p);
    } else if (state_.event_log.empty()) {
      throw ContractError("first event must be " + std::string(kStart));
    } else if (type == kFamiliarized) {
      apply_familiarization();
    } else if (type == kGroupExtremes) {
      apply_group_extremes(p.at("group_index").get<int>(),
                           p.at("most_pleasant").get<int>(),
                           p.at("most_unpleasant").get<int>());
    } else if (type == kAnchors) {
      apply_anchors(p.at("best").get<int>(), p.at("worst").get<int>());
    } else if (type == kRating) {
      apply_rating(p.at("stimulus_id").get<int>(), p.at("value").get<int>());
    } else if (type == kChoice) {
      apply_choice(p.at("id_a").get<int>(), p.at("id_b").get<int>(),
                   p.at("winner").get<int>());
    } else if (type == kStimulusReplay) {
      if (state_.phase == Phase::Complete) {
        throw ProtocolViolation("session is complete");
      }
      require_stimulus(p.at("stimulus_id").get<int>());
    } else if (type == kPresent) {
      require_stimulus(p.at("stimulus_id").get<int>());
    } else if (type == kDegraded) {
      // Metadata only.
    } else {
      throw ContractError("unknown event type '" + type + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ContractError("malformed " + type + " payload: " + e.what());
  }
}

void Session::apply_start(const nlohmann::json& payload) {
  if (!state_.event_log.empty()) {
    throw ContractError("session already started");
  }
  SessionConfig config;
  config.seed = payload.at("seed").get<std::uint64_t>();
  config.catalog = catalog_from_json(payload.at("catalog").dump());
  config.schedule = rule_from_json(payload.at("schedule_rule"));
  if (payload.contains("bt_alpha")) {
    config.bt_alpha = payload.at("bt_alpha").get<double>();
  }
  validate_catalog(config.catalog);
  config.schedule.validate();

  const int n = static_cast<int>(config.catalog.size());
  state_.familiarization_order =
      shuffled_ids(n, derive_seed(config.seed, kFamiliarizationStream));
  const auto partition = shuffled_ids(n, derive_seed(config.seed, kGroupStream));
  for (int g = 0; g < kGroupCount; ++g) {
    for (int k = 0; k < kGroupSize; ++k) {
      state_.groups[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] =
          partition[static_cast<std::size_t>(g * kGroupSize + k)];
    }
  }
  state_.config = std::move(config);
  state_.phase = Phase::Familiarization;
}

void Session::require_phase(Phase expected) const {
  if (state_.phase != expected) {
    throw ProtocolViolation("expected phase " + std::string(to_string(expected)) +
                            " but session is in " +
                            std::string(to_string(state_.phase)));
  }
}

void Session::require_stimulus(int stimulus_id) const {
  if (stimulus_id < 0 ||
      static_cast<std::size_t>(stimulus_id) >= state_.config.catalog.size()) {
    throw ProtocolViolation("unknown stimulus " + std::to_string(stimulus_id));
  }
}

void Session::apply_familiarization() {
  require_phase(Phase::Familiarization);
  state_.phase = Phase::GroupExtremes;
}

void Session::apply_group_extremes(int group_index, int most_pleasant_id,
                                   int most_unpleasant_id) {
  require_phase(Phase::GroupExtremes);
  if (group_index < 0 || group_index >= kGroupCount) {
    throw ProtocolViolation("no group " + std::to_string(group_index));
  }
  const auto g = static_cast<std::size_t>(group_index);
  if (state_.group_picks[g]) {
    throw DuplicateResponse("group " + std::to_string(group_index) +
                            " already answered");
  }
  const auto& group = state_.groups[g];
  const auto in_group = [&](int id) {
    return std::find(group.begin(), group.end(), id) != group.end();
  };
  if (!in_group(most_pleasant_id) || !in_group(most_unpleasant_id)) {
    throw ProtocolViolation("picked stimulus is not in group " +
                            std::to_string(group_index));
  }
  if (most_pleasant_id == most_unpleasant_id) {
    throw ProtocolViolation("most pleasant and most unpleasant must differ");
  }
  state_.group_picks[g] = GroupPick{most_pleasant_id, most_unpleasant_id};

  const bool all_answered =
      std::all_of(state_.group_picks.begin(), state_.group_picks.end(),
                  [](const auto& pick) { return pick.has_value(); });
  if (all_answered) {
    for (const auto& pick : state_.group_picks) {
      if (!contains(state_.pleasant_candidates, pick->most_pleasant)) {
        state_.pleasant_candidates.push_back(pick->most_pleasant);
      }
      if (!contains(state_.unpleasant_candidates, pick->most_unpleasant)) {
        state_.unpleasant_candidates.push_back(pick->most_unpleasant);
      }
    }
    state_.phase = Phase::AnchorSelection;
  }
}

void Session::apply_anchors(int best_id, int worst_id) {
  require_phase(Phase::AnchorSelection);
  if (best_id == worst_id) {
    throw ProtocolViolation("the +3 and -3 anchors must differ");
  }
  if (!contains(state_.pleasant_candidates, best_id)) {
    throw ProtocolViolation("stimulus " + std::to_string(best_id) +
                            " is not a pleasant candidate");
  }
  if (!contains(state_.unpleasant_candidates, worst_id)) {
    throw ProtocolViolation("stimulus " + std::to_string(worst_id) +
                            " is not an unpleasant candidate");
  }
  state_.anchors = {best_id, worst_id};
  state_.ratings = {{best_id, kRatingMax, true}, {worst_id, kRatingMin, true}};
  const int n = static_cast<int>(state_.config.catalog.size());
  for (int id : shuffled_ids(n, derive_seed(state_.config.seed, kRatingOrderStream))) {
    if (id != best_id && id != worst_id) state_.rating_order.push_back(id);
  }
  state_.phase = Phase::LikertRating;
}

void Session::apply_rating(int stimulus_id, int value) {
  require_phase(Phase::LikertRating);
  require_stimulus(stimulus_id);
  if (value < kRatingMin || value > kRatingMax) {
    throw ProtocolViolation("rating must be an integer in [-3, +3], got " +
                            std::to_string(value));
  }
  for (const auto& r : state_.ratings) {
    if (r.stimulus_id != stimulus_id) continue;
    if (r.is_anchor) {
      throw ProtocolViolation("anchor stimulus " + std::to_string(stimulus_id) +
                              " cannot be re-rated");
    }
    throw DuplicateResponse("stimulus " + std::to_string(stimulus_id) +
                            " already rated");
  }
  state_.ratings.push_back({stimulus_id, value, false});
  if (state_.ratings.size() == state_.config.catalog.size()) {
    state_.schedule =
        build_schedule(state_.ratings, derive_seed(state_.config.seed, kScheduleStream),
                       state_.config.schedule);
    state_.phase = state_.schedule.trials.empty() ? Phase::Complete
                                                  : Phase::PairwiseComparison;
  }
}

void Session::apply_choice(int id_a, int id_b, int winner_id) {
  require_phase(Phase::PairwiseComparison);
  const auto index = state_.choices.size();
  const auto& head = state_.schedule.trials[index];
  const bool same_pair = (id_a == head.id_a && id_b == head.id_b) ||
                         (id_a == head.id_b && id_b == head.id_a);
  if (!same_pair) {
    throw SequencingViolation("pair (" + std::to_string(id_a) + "," +
                              std::to_string(id_b) +
                              ") is not the current trial");
  }
  if (winner_id != head.id_a && winner_id != head.id_b) {
    throw ProtocolViolation("winner " + std::to_string(winner_id) +
                            " is not in the presented pair");
  }
  state_.choices.push_back(
      {static_cast<int>(index), head.id_a, head.id_b, winner_id});
  if (state_.choices.size() == state_.schedule.trials.size()) {
    state_.phase = Phase::Complete;
  }
}

void Session::confirm_familiarization(std::string_view idempotency_key) {
  append(kFamiliarized, nlohmann::json::object(), idempotency_key);
}

void Session::record_group_extremes(int group_index, int most_pleasant_id,
                                    int most_unpleasant_id,
                                    std::string_view idempotency_key) {
  append(kGroupExtremes,
         {{"group_index", group_index},
          {"most_pleasant", most_pleasant_id},
          {"most_unpleasant", most_unpleasant_id}},
         idempotency_key);
}

void Session::record_anchors(int best_id, int worst_id,
                             std::string_view idempotency_key) {
  append(kAnchors, {{"best", best_id}, {"worst", worst_id}}, idempotency_key);
}

void Session::record_rating(int stimulus_id, int value,
                            std::string_view idempotency_key) {
  append(kRating, {{"stimulus_id", stimulus_id}, {"value", value}},
         idempotency_key);
}

void Session::record_choice(int id_a, int id_b, int winner_id,
                            std::string_view idempotency_key) {
  append(kChoice, {{"id_a", id_a}, {"id_b", id_b}, {"winner", winner_id}},
         idempotency_key);
}

void Session::record_stimulus_replay(int stimulus_id,
                                     std::string_view idempotency_key) {
  append(kStimulusReplay, {{"stimulus_id", stimulus_id}}, idempotency_key);
}

void Session::record_presentation(int stimulus_id, std::string_view sink) {
  append(kPresent, {{"stimulus_id", stimulus_id}, {"sink", std::string(sink)}},
         {});
}

void Session::record_presenter_degraded(std::string_view reason) {
  append(kDegraded, {{"reason", std::string(reason)}}, {});
}

bool Session::presenter_degraded() const {
  return std::any_of(state_.event_log.begin(), state_.event_log.end(),
                     [](const Event& e) { return e.event_type == kDegraded; });
}

std::optional<int> Session::remaining_trials() const {
  if (state_.phase < Phase::PairwiseComparison) return std::nullopt;
  return static_cast<int>(state_.schedule.trials.size() - state_.choices.size());
}

std::optional<std::size_t> Session::find_idempotency_key(
    std::string_view key) const {
  const auto it = idempotency_index_.find(key);
  if (it == idempotency_index_.end()) return std::nullopt;
  return it->second;
}

PromptDescriptor Session::next_prompt() const {
  PromptDescriptor prompt;
  prompt.phase = state_.phase;
  switch (state_.phase) {
    case Phase::Familiarization:
      prompt.response = ResponseKind::ConfirmFamiliarization;
      prompt.stimuli = state_.familiarization_order;
      prompt.total = 1;
      break;
    case Phase::GroupExtremes: {
      prompt.response = ResponseKind::PickGroupExtremes;
      prompt.total = kGroupCount;
      for (int g = 0; g < kGroupCount; ++g) {
        if (state_.group_picks[static_cast<std::size_t>(g)]) {
          ++prompt.answered;
        } else if (!prompt.group_index) {
          prompt.group_index = g;
          const auto& group = state_.groups[static_cast<std::size_t>(g)];
          prompt.stimuli.assign(group.begin(), group.end());
        }
      }
      break;
    }
    case Phase::AnchorSelection:
      prompt.response = ResponseKind::PickAnchors;
      prompt.pleasant_candidates = state_.pleasant_candidates;
      prompt.unpleasant_candidates = state_.unpleasant_candidates;
      prompt.stimuli = state_.pleasant_candidates;
      prompt.stimuli.insert(prompt.stimuli.end(),
                            state_.unpleasant_candidates.begin(),
                            state_.unpleasant_candidates.end());
      prompt.total = 1;
      break;
    case Phase::LikertRating: {
      prompt.response = ResponseKind::IntegerRating;
      prompt.anchors = state_.anchors;
      prompt.total = static_cast<int>(state_.rating_order.size());
      prompt.answered = static_cast<int>(state_.ratings.size()) - 2;
      for (int id : state_.rating_order) {
        const bool rated =
            std::any_of(state_.ratings.begin(), state_.ratings.end(),
                        [id](const LikertRating& r) { return r.stimulus_id == id; });
        if (!rated) {
          prompt.stimuli = {id};
          break;
        }
      }
      break;
    }
    case Phase::PairwiseComparison: {
      prompt.response = ResponseKind::ForcedChoice;
      const auto index = state_.choices.size();
      const auto& head = state_.schedule.trials[index];
      prompt.stimuli = {head.id_a, head.id_b};
      prompt.trial_index = static_cast<int>(index);
      prompt.answered = static_cast<int>(index);
      prompt.total = static_cast<int>(state_.schedule.trials.size());
      break;
    }
    case Phase::Complete:
      throw SessionFinished("session " + state_.session_id + " is complete");
  }
  return prompt;
}

ComparisonDataset Session::assemble_dataset() const {
  if (state_.phase != Phase::Complete) {
    throw ContractError("session " + state_.session_id + " is not complete");
  }
  ComparisonDataset dataset(static_cast<int>(state_.config.catalog.size()));
  for (const auto& choice : state_.choices) {
    const int loser = choice.winner == choice.id_a ? choice.id_b : choice.id_a;
    dataset.add(choice.winner, loser, Provenance::Observed);
  }
  for (const auto& omitted : state_.schedule.omitted) {
    const int loser =
        omitted.implied_winner == omitted.id_a ? omitted.id_b : omitted.id_a;
    dataset.add(omitted.implied_winner, loser, Provenance::Synthetic,
                state_.config.schedule.synthetic_weight);
  }
  return dataset;
}

std::string ratings_to_csv(std::span<const LikertRating> ratings) {
  std::vector<LikertRating> sorted(ratings.begin(), ratings.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.stimulus_id < b.stimulus_id; });
  std::ostringstream os;
  os << "stimulus_id,rating,is_anchor\n";
  for (const auto& r : sorted) {
    os << r.stimulus_id << ',' << r.value << ',' << (r.is_anchor ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<LikertRating> ratings_from_csv(const std::string& text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ContractError("ratings CSV is missing its header");
  csv::expect_header(rows.front(), {"stimulus_id", "rating", "is_anchor"});
  std::vector<LikertRating> ratings;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) {
      throw ContractError("ratings row " + std::to_string(r) +
                          " must have 3 fields");
    }
    const bool anchor = row[2] == "1" || row[2] == "true";
    if (!anchor && row[2] != "0" && row[2] != "false") {
      throw ContractError("is_anchor must be 0/1 or true/false");
    }
    ratings.push_back({csv::to_int(row[0]), csv::to_int(row[1]), anchor});
  }
  return ratings;
}

std::string schedule_to_csv(const ComparisonSchedule& schedule,
                            std::span<const Choice> choices) {
  std::ostringstream os;
  os << "trial_index,id_a,id_b,winner_id\n";
  for (std::size_t i = 0; i < schedule.trials.size(); ++i) {
    const auto& t = schedule.trials[i];
    os << i << ',' << t.id_a << ',' << t.id_b << ',';
    if (i < choices.size()) os << choices[i].winner;
    os << '\n';
  }
  return os.str();
}

std::string omitted_to_csv(const ComparisonSchedule& schedule) {
  std::ostringstream os;
  os << "id_a,id_b,implied_winner\n";
  for (const auto& o : schedule.omitted) {
    os << o.id_a << ',' << o.id_b << ',' << o.implied_winner << '\n';
  }
  return os.str();
}

}  // namespace elicit
