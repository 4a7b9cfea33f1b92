#include "elicit/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "elicit/errors.hpp"
#include "elicit/random.hpp"

namespace elicit {

namespace {

constexpr std::uint64_t kPerceptionStream = 11;
constexpr std::uint64_t kChoiceStream = 12;
constexpr std::uint64_t kUtilityStream = 13;

std::vector<double> ratings_by_id(const std::vector<LikertRating>& ratings) {
  std::vector<double> out(ratings.size(), 0.0);
  for (const auto& r : ratings) {
    out[static_cast<std::size_t>(r.stimulus_id)] = r.value;
  }
  return out;
}

}  // namespace

SyntheticParticipant::SyntheticParticipant(ParticipantProfile profile)
    : profile_(std::move(profile)),
      choice_rng_(derive_seed(profile_.seed, kChoiceStream)) {
  if (!(profile_.choice_temperature > 0.0)) {
    throw ContractError("choice temperature must be positive");
  }
  if (!(profile_.rating_noise_sd >= 0.0)) {
    throw ContractError("rating noise sd must be non-negative");
  }
  perceived_ = profile_.utilities;
  if (profile_.rating_noise_sd > 0.0) {
    std::mt19937_64 rng(derive_seed(profile_.seed, kPerceptionStream));
    std::normal_distribution<double> noise(0.0, profile_.rating_noise_sd);
    for (double& p : perceived_) p += noise(rng);
  }
}

int SyntheticParticipant::most_pleasant(std::span<const int> ids) const {
  return *std::max_element(ids.begin(), ids.end(), [&](int a, int b) {
    return perceived_[static_cast<std::size_t>(a)] <
           perceived_[static_cast<std::size_t>(b)];
  });
}

int SyntheticParticipant::most_unpleasant(std::span<const int> ids) const {
  // Ties resolve to the last listed id so a flat group still yields two
  // distinct picks.
  return *std::min_element(ids.rbegin(), ids.rend(), [&](int a, int b) {
    return perceived_[static_cast<std::size_t>(a)] <
           perceived_[static_cast<std::size_t>(b)];
  });
}

int SyntheticParticipant::rate(int stimulus_id, int best_anchor,
                               int worst_anchor) const {
  const double top = perceived_[static_cast<std::size_t>(best_anchor)];
  const double bottom = perceived_[static_cast<std::size_t>(worst_anchor)];
  if (!(top > bottom)) return 0;
  const double unit =
      (perceived_[static_cast<std::size_t>(stimulus_id)] - bottom) / (top - bottom);
  const auto rating = static_cast<int>(std::lround(-3.0 + 6.0 * unit));
  return std::clamp(rating, kRatingMin, kRatingMax);
}

int SyntheticParticipant::choose(int id_a, int id_b) {
  const double ua = profile_.utilities[static_cast<std::size_t>(id_a)];
  const double ub = profile_.utilities[static_cast<std::size_t>(id_b)];
  if (profile_.deterministic_choice) return ua >= ub ? id_a : id_b;
  const double t = profile_.choice_temperature;
  const double p = win_probability(ua / t, ub / t);
  return uniform_unit(choice_rng_) < p ? id_a : id_b;
}

int simulate_choice(SyntheticParticipant& participant, int id_a, int id_b) {
  return participant.choose(id_a, id_b);
}

void answer_session(Session& session, SyntheticParticipant& participant) {
  while (session.phase() != Phase::Complete) {
    const auto prompt = session.next_prompt();
    switch (prompt.response) {
      case ResponseKind::ConfirmFamiliarization:
        session.confirm_familiarization();
        break;
      case ResponseKind::PickGroupExtremes:
        session.record_group_extremes(*prompt.group_index,
                                      participant.most_pleasant(prompt.stimuli),
                                      participant.most_unpleasant(prompt.stimuli));
        break;
      case ResponseKind::PickAnchors:
        session.record_anchors(
            participant.most_pleasant(prompt.pleasant_candidates),
            participant.most_unpleasant(prompt.unpleasant_candidates));
        break;
      case ResponseKind::IntegerRating: {
        const int id = prompt.stimuli.front();
        session.record_rating(
            id, participant.rate(id, prompt.anchors->first, prompt.anchors->second));
        break;
      }
      case ResponseKind::ForcedChoice: {
        const int a = prompt.stimuli[0];
        const int b = prompt.stimuli[1];
        session.record_choice(a, b, participant.choose(a, b));
        break;
      }
    }
  }
}

std::vector<LikertRating> simulate_likert(const SyntheticParticipant& participant,
                                          const std::vector<StimulusSpec>& catalog,
                                          std::uint64_t session_seed) {
  // Ratings never consult the choice stream, so a copy leaves the caller's
  // participant untouched.
  SyntheticParticipant copy = participant;
  std::int64_t tick = 0;
  auto session = Session::start("likert", {session_seed, catalog, {}, std::nullopt},
                                [&tick] { return tick++; });
  while (session.phase() < Phase::PairwiseComparison) {
    const auto prompt = session.next_prompt();
    switch (prompt.response) {
      case ResponseKind::ConfirmFamiliarization:
        session.confirm_familiarization();
        break;
      case ResponseKind::PickGroupExtremes:
        session.record_group_extremes(*prompt.group_index,
                                      copy.most_pleasant(prompt.stimuli),
                                      copy.most_unpleasant(prompt.stimuli));
        break;
      case ResponseKind::PickAnchors:
        session.record_anchors(copy.most_pleasant(prompt.pleasant_candidates),
                               copy.most_unpleasant(prompt.unpleasant_candidates));
        break;
      case ResponseKind::IntegerRating: {
        const int id = prompt.stimuli.front();
        session.record_rating(
            id, copy.rate(id, prompt.anchors->first, prompt.anchors->second));
        break;
      }
      case ResponseKind::ForcedChoice:
        break;
    }
  }
  auto ratings = session.state().ratings;
  std::sort(ratings.begin(), ratings.end(),
            [](const auto& a, const auto& b) { return a.stimulus_id < b.stimulus_id; });
  return ratings;
}

SimulatedSession run_session(SyntheticParticipant& participant,
                             const std::vector<StimulusSpec>& catalog,
                             std::uint64_t seed,
                             const SimulationOptions& options) {
  if (participant.profile().utilities.size() != catalog.size()) {
    throw ContractError("participant utilities must cover the catalog");
  }
  auto tick = std::make_shared<std::int64_t>(0);
  auto session = Session::start("sim-" + std::to_string(seed),
                                {seed, catalog, options.schedule, std::nullopt},
                                [tick] { return (*tick)++; });
  answer_session(session, participant);

  auto dataset = session.assemble_dataset();
  auto estimate = estimate_ilsr(dataset, options.estimator);
  if (estimate.normalized_scores.empty()) {
    throw DegenerateScaleError("estimated strengths are all equal");
  }
  auto result = make_participant_result(
      session.state().session_id, ratings_by_id(session.state().ratings),
      estimate.normalized_scores, options.correlation);
  return {std::move(session), std::move(dataset), std::move(estimate),
          std::move(result)};
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("vectors must have equal length");
  if (a.size() < 2) throw ContractError("need at least two values");
  double concordant = 0.0, discordant = 0.0, ties_a = 0.0, ties_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) continue;
      if (da == 0.0) {
        ties_a += 1.0;
      } else if (db == 0.0) {
        ties_b += 1.0;
      } else if ((da > 0.0) == (db > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double denominator =
      std::sqrt((concordant + discordant + ties_a) * (concordant + discordant + ties_b));
  if (denominator == 0.0) {
    throw UndefinedCorrelationError("kendall tau undefined for constant input");
  }
  return (concordant - discordant) / denominator;
}

RecoveryMetrics recovery_metrics(std::span<const double> true_utilities,
                                 std::span<const double> estimated_scores) {
  RecoveryMetrics m;
  m.kendall_tau = kendall_tau(true_utilities, estimated_scores);
  m.spearman_rho = spearman_rho(true_utilities, estimated_scores);
  m.top1_match =
      std::max_element(true_utilities.begin(), true_utilities.end()) -
          true_utilities.begin() ==
      std::max_element(estimated_scores.begin(), estimated_scores.end()) -
          estimated_scores.begin();
  return m;
}

ParticipantProfile sample_profile(const CohortParams& params, std::uint64_t seed,
                                  int n_items) {
  ParticipantProfile profile;
  std::mt19937_64 rng(derive_seed(seed, kUtilityStream));
  profile.utilities.resize(static_cast<std::size_t>(n_items));
  for (double& u : profile.utilities) {
    u = params.utility_spread * (2.0 * uniform_unit(rng) - 1.0);
  }
  profile.choice_temperature = params.choice_temperature;
  profile.rating_noise_sd = params.rating_noise_sd;
  profile.deterministic_choice = params.deterministic_choice;
  profile.seed = seed;
  return profile;
}

}  // namespace elicit
