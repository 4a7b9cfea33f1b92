#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "elicit/bt.hpp"
#include "elicit/event_log.hpp"
#include "elicit/stimulus.hpp"

namespace elicit {

enum class Phase {
  Familiarization,
  GroupExtremes,
  AnchorSelection,
  LikertRating,
  PairwiseComparison,
  Complete
};

std::string_view to_string(Phase phase);

inline constexpr int kGroupCount = 5;
inline constexpr int kGroupSize = 3;
inline constexpr int kRatingMin = -3;
inline constexpr int kRatingMax = 3;

struct LikertRating {
  int stimulus_id = 0;
  int value = 0;
  bool is_anchor = false;

  bool operator==(const LikertRating&) const = default;
};

/// How many times a pair is compared, indexed by its absolute rating gap.
/// Gaps at or past the end of `repeats_by_gap`, or with a zero entry, are
/// omitted and receive synthetic outcomes.
struct ScheduleRule {
  std::vector<int> repeats_by_gap{2, 1};
  /// Synthetic wins added per omitted pair.
  int synthetic_weight = 1;

  int repeats_for_gap(int gap) const;
  void validate() const;

  bool operator==(const ScheduleRule&) const = default;
};

/// One forced-choice trial; id_a is shown first (left).
struct ScheduledTrial {
  int id_a = 0;
  int id_b = 0;
  int repetition = 0;

  bool operator==(const ScheduledTrial&) const = default;
};

struct OmittedPair {
  int id_a = 0;
  int id_b = 0;
  int implied_winner = 0;

  bool operator==(const OmittedPair&) const = default;
};

struct PairCounts {
  int twice = 0;
  int once = 0;
  int omitted = 0;
  /// Pairs scheduled with any other repeat count (non-default rules only).
  int other = 0;
  int total_trials = 0;
};

struct ComparisonSchedule {
  std::vector<ScheduledTrial> trials;
  std::vector<OmittedPair> omitted;
  std::uint64_t seed = 0;

  PairCounts counts() const;

  bool operator==(const ComparisonSchedule&) const = default;
};

/// Pairs every two of the n rated items by rating gap. Trial order and the
/// left/right order within each trial are drawn from `seed`.
ComparisonSchedule build_schedule(std::span<const LikertRating> ratings,
                                  std::uint64_t seed,
                                  const ScheduleRule& rule = {});

struct GroupPick {
  int most_pleasant = 0;
  int most_unpleasant = 0;

  bool operator==(const GroupPick&) const = default;
};

struct Choice {
  int trial_index = 0;
  int id_a = 0;
  int id_b = 0;
  int winner = 0;

  bool operator==(const Choice&) const = default;
};

struct SessionConfig {
  std::uint64_t seed = 0;
  std::vector<StimulusSpec> catalog = default_catalog();
  ScheduleRule schedule;
  /// Per-session regularization override for result estimation.
  std::optional<double> bt_alpha;

  bool operator==(const SessionConfig&) const = default;
};

struct SessionState {
  std::string session_id;
  Phase phase = Phase::Familiarization;
  SessionConfig config;
  std::vector<int> familiarization_order;
  std::array<std::array<int, kGroupSize>, kGroupCount> groups{};
  std::array<std::optional<GroupPick>, kGroupCount> group_picks{};
  std::vector<int> pleasant_candidates;
  std::vector<int> unpleasant_candidates;
  std::optional<std::pair<int, int>> anchors;  // (+3 id, -3 id)
  std::vector<int> rating_order;
  std::vector<LikertRating> ratings;
  ComparisonSchedule schedule;
  std::vector<Choice> choices;
  std::vector<Event> event_log;

  bool operator==(const SessionState&) const = default;
};

/// Canonical structured form; equal states serialize identically.
nlohmann::json to_json(const SessionState& state);

/// FNV-1a over the canonical serialization, as 16 hex digits.
std::string state_hash(const SessionState& state);

enum class ResponseKind {
  ConfirmFamiliarization,
  PickGroupExtremes,
  PickAnchors,
  IntegerRating,
  ForcedChoice
};

std::string_view to_string(ResponseKind kind);

/// Everything the participant-facing view needs for the current step and
/// nothing about the schedule beyond the current trial.
struct PromptDescriptor {
  Phase phase = Phase::Familiarization;
  ResponseKind response = ResponseKind::ConfirmFamiliarization;
  std::vector<int> stimuli;
  std::optional<int> group_index;
  std::vector<int> pleasant_candidates;
  std::vector<int> unpleasant_candidates;
  std::optional<std::pair<int, int>> anchors;
  std::optional<int> trial_index;
  int answered = 0;
  int total = 0;

  nlohmann::json to_json() const;
};

using Clock = std::function<std::int64_t()>;

/// Milliseconds since the Unix epoch.
std::int64_t system_clock_ms();

/// The elicitation state machine. Every accepted call appends exactly one
/// event; a call that throws leaves the state untouched.
class Session {
 public:
  static Session start(std::string session_id, SessionConfig config,
                       Clock clock = system_clock_ms);

  /// Rebuilds a session from its event log. Timestamps are taken from the
  /// log, so the result equals the original state.
  static Session replay(std::span<const Event> log,
                        Clock clock = system_clock_ms);

  void confirm_familiarization(std::string_view idempotency_key = {});
  void record_group_extremes(int group_index, int most_pleasant_id,
                             int most_unpleasant_id,
                             std::string_view idempotency_key = {});
  void record_anchors(int best_id, int worst_id,
                      std::string_view idempotency_key = {});
  void record_rating(int stimulus_id, int value,
                     std::string_view idempotency_key = {});
  void record_choice(int id_a, int id_b, int winner_id,
                     std::string_view idempotency_key = {});

  /// Participant asked to feel a stimulus again. Logged only.
  void record_stimulus_replay(int stimulus_id,
                              std::string_view idempotency_key = {});
  /// Presentation command issued to the presenter sink. Logged only.
  void record_presentation(int stimulus_id, std::string_view sink);
  /// Presenter sink failed; the session continues in degraded mode.
  void record_presenter_degraded(std::string_view reason);

  PromptDescriptor next_prompt() const;

  /// Observed outcome per answered trial plus synthetic outcomes for omitted
  /// pairs. Requires a complete session.
  ComparisonDataset assemble_dataset() const;

  const SessionState& state() const { return state_; }
  Phase phase() const { return state_.phase; }
  bool presenter_degraded() const;
  /// Unanswered comparisons; empty before the schedule exists.
  std::optional<int> remaining_trials() const;

  /// Index into the event log of the event carrying this key, if any.
  std::optional<std::size_t> find_idempotency_key(std::string_view key) const;

 private:
  Session(SessionState state, Clock clock)
      : state_(std::move(state)), clock_(std::move(clock)) {}

  void append(std::string event_type, nlohmann::json payload,
              std::string_view idempotency_key);
  void apply(const Event& event);

  void apply_start(const nlohmann::json& payload);
  void apply_familiarization();
  void apply_group_extremes(int group_index, int most_pleasant_id,
                            int most_unpleasant_id);
  void apply_anchors(int best_id, int worst_id);
  void apply_rating(int stimulus_id, int value);
  void apply_choice(int id_a, int id_b, int winner_id);
  void require_phase(Phase expected) const;
  void require_stimulus(int stimulus_id) const;

  SessionState state_;
  Clock clock_;
  std::map<std::string, std::size_t, std::less<>> idempotency_index_;
};

/// `stimulus_id,rating,is_anchor`
std::string ratings_to_csv(std::span<const LikertRating> ratings);
std::vector<LikertRating> ratings_from_csv(const std::string& text);

/// `trial_index,id_a,id_b,winner_id`; winner is blank for unanswered trials.
std::string schedule_to_csv(const ComparisonSchedule& schedule,
                            std::span<const Choice> choices = {});
/// `id_a,id_b,implied_winner`
std::string omitted_to_csv(const ComparisonSchedule& schedule);

}  // namespace elicit
