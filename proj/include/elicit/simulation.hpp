#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "elicit/analysis.hpp"
#include "elicit/bt.hpp"
#include "elicit/protocol.hpp"

namespace elicit {

struct ParticipantProfile {
  /// Latent pleasantness per stimulus id.
  std::vector<double> utilities;
  /// Choice strengths are exp(u / temperature).
  double choice_temperature = 1.0;
  /// Gaussian perception noise applied once per stimulus before rating.
  double rating_noise_sd = 0.0;
  /// Higher utility always wins; stands in for the zero-temperature limit.
  bool deterministic_choice = false;
  std::uint64_t seed = 0;
};

/// A simulated participant. Ratings come from a noisy perceived utility;
/// forced choices follow the Bradley-Terry rule on the latent utility.
class SyntheticParticipant {
 public:
  explicit SyntheticParticipant(ParticipantProfile profile);

  const ParticipantProfile& profile() const { return profile_; }
  const std::vector<double>& perceived() const { return perceived_; }

  int most_pleasant(std::span<const int> ids) const;
  int most_unpleasant(std::span<const int> ids) const;
  /// Affine map of perceived utility onto the anchors' [-3, +3] span,
  /// rounded and clamped.
  int rate(int stimulus_id, int best_anchor, int worst_anchor) const;
  /// Draws the winner of one forced-choice trial.
  int choose(int id_a, int id_b);

 private:
  ParticipantProfile profile_;
  std::vector<double> perceived_;
  std::mt19937_64 choice_rng_;
};

/// Drives a fresh session (groups drawn from `session_seed`) through the
/// pre-evaluation and returns all 15 ratings, anchors included.
std::vector<LikertRating> simulate_likert(const SyntheticParticipant& participant,
                                          const std::vector<StimulusSpec>& catalog,
                                          std::uint64_t session_seed = 0);

int simulate_choice(SyntheticParticipant& participant, int id_a, int id_b);

/// Walks a session from its current phase to Complete.
void answer_session(Session& session, SyntheticParticipant& participant);

struct SimulationOptions {
  EstimatorOptions estimator;
  ScheduleRule schedule;
  CorrelationKind correlation = CorrelationKind::Pearson;
};

struct SimulatedSession {
  Session session;
  ComparisonDataset dataset;
  StrengthEstimate estimate;
  ParticipantResult result;
};

/// Full pipeline: protocol, dataset assembly, ILSR estimate, normalization
/// and before/after analysis. Timestamps come from a counter so the event
/// log depends only on the inputs.
SimulatedSession run_session(SyntheticParticipant& participant,
                             const std::vector<StimulusSpec>& catalog,
                             std::uint64_t seed,
                             const SimulationOptions& options = {});

struct RecoveryMetrics {
  double kendall_tau = 0.0;
  double spearman_rho = 0.0;
  bool top1_match = false;
};

/// Kendall tau-b (tau-a when there are no ties), Spearman rho on mid-ranks,
/// and whether both vectors put the same item first.
double kendall_tau(std::span<const double> a, std::span<const double> b);
RecoveryMetrics recovery_metrics(std::span<const double> true_utilities,
                                 std::span<const double> estimated_scores);

/// Parameters of the synthetic cohort used for the budget and correlation
/// checks. Utilities are uniform on [-spread, +spread].
struct CohortParams {
  double utility_spread = 1.0;
  double rating_noise_sd = 0.2;
  double choice_temperature = 0.25;
  bool deterministic_choice = false;
};

ParticipantProfile sample_profile(const CohortParams& params, std::uint64_t seed,
                                  int n_items = kCatalogSize);

}  // namespace elicit
