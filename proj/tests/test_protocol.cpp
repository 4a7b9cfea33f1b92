#include "elicit/protocol.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "elicit/errors.hpp"

using namespace elicit;

namespace {

std::int64_t fake_now = 0;
std::int64_t ticking_clock() { return fake_now += 7; }

Session start(std::uint64_t seed, SessionConfig config = {}) {
  config.seed = seed;
  return Session::start("s-" + std::to_string(seed), std::move(config),
                        ticking_clock);
}

// Answers every prompt as a participant whose preference is `utility` and
// whose Likert answer for id i is ratings[i].
void drive(Session& session, const std::vector<double>& utility,
           const std::vector<int>& ratings, bool stop_before_choices = false) {
  while (session.phase() != Phase::Complete) {
    const auto prompt = session.next_prompt();
    const auto by_utility = [&](int a, int b) {
      return utility[static_cast<std::size_t>(a)] <
             utility[static_cast<std::size_t>(b)];
    };
    switch (prompt.response) {
      case ResponseKind::ConfirmFamiliarization:
        session.confirm_familiarization();
        break;
      case ResponseKind::PickGroupExtremes: {
        const auto& s = prompt.stimuli;
        session.record_group_extremes(
            *prompt.group_index, *std::max_element(s.begin(), s.end(), by_utility),
            *std::min_element(s.begin(), s.end(), by_utility));
        break;
      }
      case ResponseKind::PickAnchors: {
        const auto& p = prompt.pleasant_candidates;
        const auto& u = prompt.unpleasant_candidates;
        session.record_anchors(*std::max_element(p.begin(), p.end(), by_utility),
                               *std::min_element(u.begin(), u.end(), by_utility));
        break;
      }
      case ResponseKind::IntegerRating: {
        const int id = prompt.stimuli.at(0);
        session.record_rating(id, ratings[static_cast<std::size_t>(id)]);
        break;
      }
      case ResponseKind::ForcedChoice: {
        if (stop_before_choices) return;
        const int a = prompt.stimuli[0];
        const int b = prompt.stimuli[1];
        session.record_choice(a, b, by_utility(a, b) ? b : a);
        break;
      }
    }
  }
}

// Utility = id, so id 14 is the +3 anchor and id 0 the -3 anchor.
std::vector<double> ascending_utility() {
  std::vector<double> u(15);
  for (int i = 0; i < 15; ++i) u[static_cast<std::size_t>(i)] = i;
  return u;
}

std::vector<int> ratings_for(const std::vector<double>& utility) {
  std::vector<int> r(utility.size());
  for (std::size_t i = 0; i < utility.size(); ++i) {
    r[i] = static_cast<int>(std::lround(-3.0 + 6.0 * utility[i] / 14.0));
  }
  return r;
}

std::vector<LikertRating> as_ratings(const std::vector<int>& values) {
  std::vector<LikertRating> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({static_cast<int>(i), values[i], false});
  }
  return out;
}

// Independent count of what the default rule should produce.
PairCounts expected_counts(const std::vector<int>& values) {
  PairCounts c;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      const int gap = std::abs(values[i] - values[j]);
      if (gap == 0) {
        ++c.twice;
      } else if (gap == 1) {
        ++c.once;
      } else {
        ++c.omitted;
      }
    }
  }
  c.total_trials = 2 * c.twice + c.once;
  return c;
}

}  // namespace

TEST(Grouping, FiveGroupsOfThreeCoverTheCatalog) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto session = start(seed);
    std::vector<int> all;
    for (const auto& g : session.state().groups) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    std::vector<int> expected(15);
    std::iota(expected.begin(), expected.end(), 0);
    ASSERT_EQ(all, expected);

    auto fam = session.state().familiarization_order;
    std::sort(fam.begin(), fam.end());
    EXPECT_EQ(fam, expected);
  }
}

TEST(Grouping, DeterministicPerSeedAndVariesAcrossSeeds) {
  std::set<std::vector<int>> distinct;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto a = start(seed);
    const auto b = start(seed);
    ASSERT_EQ(a.state().groups, b.state().groups);
    std::vector<int> flat;
    for (const auto& g : a.state().groups) flat.insert(flat.end(), g.begin(), g.end());
    distinct.insert(flat);
  }
  EXPECT_GE(distinct.size(), 995u);
}

TEST(Grouping, EveryIdLandsInEveryGroupSometimes) {
  std::map<std::pair<int, int>, int> hits;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = start(seed);
    for (int g = 0; g < kGroupCount; ++g) {
      for (int id : s.state().groups[static_cast<std::size_t>(g)]) ++hits[{id, g}];
    }
  }
  // Expected 200 per cell; a fair shuffle stays well inside [140, 260].
  ASSERT_EQ(hits.size(), 75u);
  for (const auto& [cell, n] : hits) {
    EXPECT_GT(n, 140);
    EXPECT_LT(n, 260);
  }
}

TEST(Session, PhasesAdvanceInOrder) {
  auto s = start(1);
  EXPECT_EQ(s.phase(), Phase::Familiarization);
  s.confirm_familiarization();
  EXPECT_EQ(s.phase(), Phase::GroupExtremes);
  drive(s, ascending_utility(), ratings_for(ascending_utility()), true);
  EXPECT_EQ(s.phase(), Phase::PairwiseComparison);
  EXPECT_EQ(s.state().anchors, (std::pair<int, int>{14, 0}));
  drive(s, ascending_utility(), ratings_for(ascending_utility()));
  EXPECT_EQ(s.phase(), Phase::Complete);
  EXPECT_THROW(s.next_prompt(), SessionFinished);
}

TEST(Session, AnchorsAreStoredAsPlusAndMinusThree) {
  auto s = start(2);
  drive(s, ascending_utility(), ratings_for(ascending_utility()), true);
  const auto& r = s.state().ratings;
  ASSERT_EQ(r.size(), 15u);
  EXPECT_EQ(r[0], (LikertRating{14, 3, true}));
  EXPECT_EQ(r[1], (LikertRating{0, -3, true}));
  EXPECT_EQ(std::count_if(r.begin(), r.end(), [](auto& x) { return x.is_anchor; }), 2);
}

TEST(Session, RejectsOutOfPhaseAndBadInputWithoutChangingState) {
  auto s = start(3);
  const auto before = s.state();
  EXPECT_THROW(s.record_rating(0, 1), ProtocolViolation);
  EXPECT_THROW(s.record_anchors(0, 1), ProtocolViolation);
  EXPECT_EQ(s.state(), before);

  s.confirm_familiarization();
  EXPECT_THROW(s.confirm_familiarization(), ProtocolViolation);
  const auto g0 = s.state().groups[0];
  const int outsider = s.state().groups[1][0];
  EXPECT_THROW(s.record_group_extremes(0, g0[0], outsider), ProtocolViolation);
  EXPECT_THROW(s.record_group_extremes(0, g0[0], g0[0]), ProtocolViolation);
  EXPECT_THROW(s.record_group_extremes(5, g0[0], g0[1]), ProtocolViolation);
  s.record_group_extremes(0, g0[0], g0[1]);
  EXPECT_THROW(s.record_group_extremes(0, g0[1], g0[0]), DuplicateResponse);
}

TEST(Session, AnchorsMustComeFromCandidates) {
  auto t = start(4);
  t.confirm_familiarization();
  for (int g = 0; g < kGroupCount; ++g) {
    auto group = t.state().groups[static_cast<std::size_t>(g)];
    std::sort(group.begin(), group.end());
    t.record_group_extremes(g, group[2], group[0]);
  }
  ASSERT_EQ(t.phase(), Phase::AnchorSelection);
  const auto& pleasant = t.state().pleasant_candidates;
  const auto& unpleasant = t.state().unpleasant_candidates;
  EXPECT_EQ(pleasant.size(), 5u);
  int non_candidate = 0;
  while (std::count(pleasant.begin(), pleasant.end(), non_candidate)) ++non_candidate;
  EXPECT_THROW(t.record_anchors(non_candidate, unpleasant[0]), ProtocolViolation);
  EXPECT_THROW(t.record_anchors(pleasant[0], pleasant[0]), ProtocolViolation);
  t.record_anchors(pleasant[0], unpleasant[0]);
  EXPECT_EQ(t.phase(), Phase::LikertRating);
  EXPECT_EQ(t.state().rating_order.size(), 13u);
}

TEST(Session, RatingErrors) {
  auto s = start(5);
  const auto u = ascending_utility();
  drive(s, u, ratings_for(u), true);
  // Replay only up to anchors.
  std::vector<Event> prefix;
  for (const auto& e : s.state().event_log) {
    prefix.push_back(e);
    if (e.event_type == "anchors") break;
  }
  auto r = Session::replay(prefix, ticking_clock);
  ASSERT_EQ(r.phase(), Phase::LikertRating);
  EXPECT_THROW(r.record_rating(14, 2), ProtocolViolation);  // anchor
  const int id = r.next_prompt().stimuli[0];
  EXPECT_THROW(r.record_rating(id, 4), ProtocolViolation);
  EXPECT_THROW(r.record_rating(id, -4), ProtocolViolation);
  EXPECT_THROW(r.record_rating(99, 0), ProtocolViolation);
  r.record_rating(id, 1);
  EXPECT_THROW(r.record_rating(id, 2), DuplicateResponse);
}

TEST(Session, ChoiceMustMatchTheCurrentTrial) {
  auto s = start(6);
  const auto u = ascending_utility();
  drive(s, u, ratings_for(u), true);
  const auto prompt = s.next_prompt();
  const int a = prompt.stimuli[0];
  const int b = prompt.stimuli[1];
  int c = 0;
  while (c == a || c == b) ++c;
  EXPECT_THROW(s.record_choice(a, c, a), SequencingViolation);
  EXPECT_THROW(s.record_choice(a, b, c), ProtocolViolation);
  // Reversed order names the same pair and is accepted.
  s.record_choice(b, a, a);
  EXPECT_EQ(s.state().choices[0], (Choice{0, a, b, a}));
}

TEST(Session, IdempotencyKeysAreUnique) {
  auto s = start(7);
  s.confirm_familiarization("k1");
  EXPECT_TRUE(s.find_idempotency_key("k1").has_value());
  const auto g0 = s.state().groups[0];
  EXPECT_THROW(s.record_group_extremes(0, g0[0], g0[1], "k1"), DuplicateResponse);
  EXPECT_FALSE(s.state().group_picks[0].has_value());
  const auto again = Session::replay(s.state().event_log, ticking_clock);
  EXPECT_EQ(again.find_idempotency_key("k1"), s.find_idempotency_key("k1"));
}

TEST(Session, ReplayReproducesStateExactly) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    auto s = start(seed);
    std::mt19937_64 rng(seed);
    std::vector<double> u(15);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (double& x : u) x = d(rng);
    s.record_presentation(3, "log");
    drive(s, u, ratings_for(ascending_utility()));
    s.record_presenter_degraded("test");
    const auto copy = Session::replay(s.state().event_log, ticking_clock);
    EXPECT_EQ(copy.state(), s.state());
    EXPECT_EQ(state_hash(copy.state()), state_hash(s.state()));
    const auto text = to_jsonl(s.state().event_log);
    const auto parsed = events_from_jsonl(text);
    EXPECT_EQ(state_hash(Session::replay(parsed).state()), state_hash(s.state()));
  }
}

TEST(Session, ReplayRejectsForeignOrBrokenLogs) {
  auto s = start(8);
  s.confirm_familiarization();
  auto log = s.state().event_log;
  EXPECT_THROW(Session::replay(std::span<const Event>(log).subspan(1)), ContractError);
  log[1].session_id = "other";
  EXPECT_THROW(Session::replay(log), ContractError);
  log[1].session_id = log[0].session_id;
  log[1].event_type = "mystery";
  EXPECT_THROW(Session::replay(log), ContractError);
}

TEST(Session, DatasetMarksSyntheticOutcomes) {
  auto s = start(9);
  const auto u = ascending_utility();
  const auto r = ratings_for(u);
  EXPECT_THROW(s.assemble_dataset(), ContractError);
  drive(s, u, r);
  const auto d = s.assemble_dataset();
  const auto counts = s.state().schedule.counts();
  EXPECT_EQ(d.count(Provenance::Observed), static_cast<std::size_t>(counts.total_trials));
  EXPECT_EQ(d.count(Provenance::Synthetic), static_cast<std::size_t>(counts.omitted));
  for (const auto& o : d.outcomes()) EXPECT_GT(o.winner, o.loser);
}

TEST(Session, PromptsRevealOnlyTheCurrentStep) {
  auto s = start(10);
  const auto u = ascending_utility();
  drive(s, u, ratings_for(u), true);
  const auto j = s.next_prompt().to_json();
  EXPECT_EQ(j.at("response_kind"), "forced_choice");
  EXPECT_EQ(j.at("stimuli").size(), 2u);
  EXPECT_EQ(j.at("progress").at("answered"), 0);
  std::set<std::string> keys;
  for (const auto& [key, value] : j.items()) keys.insert(key);
  EXPECT_EQ(keys, (std::set<std::string>{"phase", "response_kind", "response_schema",
                                         "stimuli", "progress", "trial_index"}));
  const auto text = j.dump();
  for (const char* leak : {"schedule", "omitted", "implied", "rating"}) {
    EXPECT_EQ(text.find(leak), std::string::npos) << leak;
  }
}

TEST(Session, RejectsBadConfig) {
  SessionConfig config;
  config.catalog.pop_back();
  EXPECT_THROW(start(1, config), ConfigError);
  SessionConfig rule;
  rule.schedule.repeats_by_gap = {0, 1};
  EXPECT_THROW(start(1, rule), ConfigError);
  SessionConfig alpha;
  alpha.bt_alpha = -1.0;
  EXPECT_THROW(start(1, alpha), ConfigError);
}

TEST(Schedule, AllEqualRatingsDoubleEveryPair) {
  const auto schedule = build_schedule(as_ratings(std::vector<int>(15, 0)), 1);
  const auto c = schedule.counts();
  EXPECT_EQ(c.twice, 105);
  EXPECT_EQ(c.total_trials, 210);
  EXPECT_EQ(c.omitted, 0);
}

TEST(Schedule, GapOfFiveIsOmittedWithHigherRatedWinner) {
  const auto schedule = build_schedule(as_ratings({2, -3}), 1);
  EXPECT_TRUE(schedule.trials.empty());
  ASSERT_EQ(schedule.omitted.size(), 1u);
  EXPECT_EQ(schedule.omitted[0], (OmittedPair{0, 1, 0}));
  const auto flipped = build_schedule(as_ratings({-3, 2}), 1);
  EXPECT_EQ(flipped.omitted[0].implied_winner, 1);
}

TEST(Schedule, CountsMatchIndependentTallyOnRandomRatings) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> value(-3, 3);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> v(15);
    for (int& x : v) x = value(rng);
    const auto schedule = build_schedule(as_ratings(v), rng());
    const auto got = schedule.counts();
    const auto want = expected_counts(v);
    ASSERT_EQ(got.twice, want.twice);
    ASSERT_EQ(got.once, want.once);
    ASSERT_EQ(got.omitted, want.omitted);
    ASSERT_EQ(got.other, 0);
    ASSERT_EQ(got.twice + got.once + got.omitted, 105);
    ASSERT_EQ(got.total_trials, 2 * got.twice + got.once);
  }
}

TEST(Schedule, RepetitionsAreNumberedInPresentationOrder) {
  const auto schedule = build_schedule(as_ratings(std::vector<int>(6, 1)), 42);
  std::map<std::pair<int, int>, int> seen;
  for (const auto& t : schedule.trials) {
    const std::pair<int, int> key = std::minmax(t.id_a, t.id_b);
    const int expected = seen[key]++;
    EXPECT_EQ(t.repetition, expected);
  }
}

TEST(Schedule, SeedControlsOrderButNotContent) {
  const auto v = as_ratings({0, 0, 1, 1, 2, -1, 3, 0});
  const auto a = build_schedule(v, 1);
  const auto b = build_schedule(v, 1);
  const auto c = build_schedule(v, 2);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.trials, c.trials);
  auto pairs = [](const ComparisonSchedule& s) {
    std::multiset<std::pair<int, int>> out;
    for (const auto& t : s.trials) out.insert(std::minmax(t.id_a, t.id_b));
    return out;
  };
  EXPECT_EQ(pairs(a), pairs(c));
}

TEST(Schedule, LeftRightIsBalanced) {
  int left_lower = 0;
  int total = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = build_schedule(as_ratings(std::vector<int>(15, 0)), seed);
    for (const auto& t : s.trials) {
      left_lower += t.id_a < t.id_b;
      ++total;
    }
  }
  // 42000 fair coin flips: sd about 102.
  EXPECT_NEAR(left_lower, total / 2, 600);
}

TEST(Schedule, CustomRuleAndErrors) {
  ScheduleRule rule;
  rule.repeats_by_gap = {3, 2, 1};
  rule.synthetic_weight = 2;
  const auto s = build_schedule(as_ratings({0, 0, 1, 3}), 5, rule);
  const auto c = s.counts();
  EXPECT_EQ(c.other, 1);    // (0,1), gap 0, three times
  EXPECT_EQ(c.twice, 2);    // (0,2) and (1,2), gap 1
  EXPECT_EQ(c.once, 1);     // (2,3), gap 2
  EXPECT_EQ(c.omitted, 2);  // (0,3) and (1,3), gap 3
  EXPECT_EQ(c.total_trials, 3 + 4 + 1);
  EXPECT_THROW(build_schedule(as_ratings({0, 0, 4}), 1), ContractError);
  EXPECT_THROW(build_schedule(as_ratings({0}), 1), ContractError);
  std::vector<LikertRating> dup{{0, 1, false}, {0, 2, false}};
  EXPECT_THROW(build_schedule(dup, 1), ContractError);
}

TEST(Csv, RatingsRoundTripAndScheduleColumns) {
  const std::vector<LikertRating> r{{1, -2, false}, {0, 3, true}};
  const auto back = ratings_from_csv(ratings_to_csv(r));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], r[1]);
  EXPECT_EQ(back[1], r[0]);

  const auto s = build_schedule(as_ratings({0, 1, 3}), 1);
  const std::vector<Choice> choices{{0, s.trials[0].id_a, s.trials[0].id_b, s.trials[0].id_a}};
  const auto text = schedule_to_csv(s, choices);
  EXPECT_EQ(text.rfind("trial_index,id_a,id_b,winner_id\n", 0), 0u);
  EXPECT_EQ(omitted_to_csv(s), "id_a,id_b,implied_winner\n0,2,2\n1,2,2\n");
}
