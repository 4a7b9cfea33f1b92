#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

enum class Provenance { Observed, Synthetic };

std::string_view to_string(Provenance provenance);
Provenance parse_provenance(std::string_view text);

struct Outcome {
  int winner = 0;
  int loser = 0;
  Provenance provenance = Provenance::Observed;

  bool operator==(const Outcome&) const = default;
};

/// Multiset of pairwise outcomes over items 0..n_items-1. Repeated records
/// stand for repeated trials.
class ComparisonDataset {
 public:
  explicit ComparisonDataset(int n_items);

  void add(int winner, int loser, Provenance provenance = Provenance::Observed,
           int count = 1);

  int n_items() const { return n_items_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  std::size_t size() const { return outcomes_.size(); }
  std::size_t count(Provenance provenance) const;

  /// Row-major n x n matrix; entry (i, j) counts wins of i over j.
  std::vector<double> win_matrix() const;

  bool operator==(const ComparisonDataset&) const = default;

 private:
  int n_items_;
  std::vector<Outcome> outcomes_;
};

enum class NormalizeOn { Log, Natural };

std::string_view to_string(NormalizeOn mode);
NormalizeOn parse_normalize_on(std::string_view text);

struct EstimatorOptions {
  /// Pseudo-wins added to every ordered pair.
  double alpha = 0.01;
  double tol = 1e-8;
  int max_iter = 10000;
  NormalizeOn normalize_on = NormalizeOn::Log;
  /// Starting log-strengths; zeros when absent.
  std::optional<std::vector<double>> initial_theta;
  /// Called after every iteration with the centered log-strengths.
  std::function<void(int iteration, std::span<const double> theta)> observer;
};

struct StrengthEstimate {
  /// Log-strengths, centered to sum zero.
  std::vector<double> theta;
  /// Scores on [-3, +3]; empty when every theta is equal.
  std::vector<double> normalized_scores;
  bool converged = false;
  int iterations = 0;
};

/// P(i beats j) = pi_i / (pi_i + pi_j) with pi = exp(theta).
double win_probability(double theta_i, double theta_j);

/// Sum of ln P(winner beats loser) over all outcomes.
double log_likelihood(const ComparisonDataset& dataset,
                      std::span<const double> theta);

/// log_likelihood plus alpha pseudo-wins on every ordered pair. This is the
/// objective both estimators maximize.
double regularized_log_likelihood(const ComparisonDataset& dataset,
                                  std::span<const double> theta, double alpha);

/// Maximum-likelihood strengths by iterated stationary distributions of the
/// win-rate Markov chain (Iterative Luce Spectral Ranking).
StrengthEstimate estimate_ilsr(const ComparisonDataset& dataset,
                               const EstimatorOptions& options = {});

/// Same objective via the minorization-maximization fixed point
/// pi_i <- w_i / sum_j n_ij / (pi_i + pi_j). Kept as an independent check on
/// estimate_ilsr.
StrengthEstimate estimate_mm(const ComparisonDataset& dataset,
                             const EstimatorOptions& options = {});

/// Min-max rescale to [0, 1] then 6s - 3. Throws DegenerateScaleError when
/// all inputs are equal.
std::vector<double> normalize_scores(std::span<const double> theta,
                                     NormalizeOn mode = NormalizeOn::Log);

struct ConnectivityReport {
  bool strongly_connected = false;
  bool weakly_connected = false;
  /// Component label per item.
  std::vector<int> strong_component;
  std::vector<int> weak_component;

  std::vector<std::vector<int>> strong_groups() const;
  std::vector<std::vector<int>> weak_groups() const;
};

/// Strong connectivity of the graph with an edge loser -> winner per outcome.
ConnectivityReport is_connected(const ComparisonDataset& dataset);

/// Header `winner_id,loser_id,provenance`.
std::string dataset_to_csv(const ComparisonDataset& dataset);
/// n_items defaults to one more than the largest id seen.
ComparisonDataset dataset_from_csv(const std::string& text,
                                   std::optional<int> n_items = std::nullopt);

/// `# key=value` metadata lines, then `item_id,theta,normalized_score`.
std::string estimate_to_csv(const StrengthEstimate& estimate,
                            const EstimatorOptions& options);

}  // namespace elicit
