#include "elicit/bt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>

#include "elicit/csv.hpp"
#include "elicit/errors.hpp"

namespace elicit {

namespace {

void center(std::vector<double>& theta) {
  const double mean = std::accumulate(theta.begin(), theta.end(), 0.0) /
                      static_cast<double>(theta.size());
  for (double& t : theta) t -= mean;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff;
}

// Stable log(1 + exp(x)).
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// ln P(i beats j) = -log(1 + exp(theta_j - theta_i)).
double log_win_probability(double theta_i, double theta_j) {
  return -softplus(theta_j - theta_i);
}

std::string describe_groups(const std::vector<std::vector<int>>& groups) {
  std::ostringstream os;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    os << (g ? " " : "") << '{';
    for (std::size_t k = 0; k < groups[g].size(); ++k) {
      os << (k ? "," : "") << groups[g][k];
    }
    os << '}';
  }
  return os.str();
}

std::vector<std::vector<int>> group_by_label(const std::vector<int>& labels) {
  const int count =
      labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  }
  return groups;
}

// Relabels so that components are numbered by their smallest member.
std::vector<int> canonical_labels(const std::vector<int>& raw) {
  std::vector<int> remap(raw.size(), -1);
  std::vector<int> out(raw.size());
  int next = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto& slot = remap[static_cast<std::size_t>(raw[i])];
    if (slot < 0) slot = next++;
    out[i] = slot;
  }
  return out;
}

void check_preconditions(const ComparisonDataset& dataset,
                         const EstimatorOptions& options) {
  const int n = dataset.n_items();
  if (n < 2) throw ContractError("estimation needs at least two items");
  if (!(options.alpha >= 0.0)) throw ContractError("alpha must be >= 0");
  if (!(options.tol > 0.0)) throw ContractError("tol must be positive");
  if (options.max_iter < 1) throw ContractError("max_iter must be positive");
  if (options.initial_theta &&
      options.initial_theta->size() != static_cast<std::size_t>(n)) {
    throw ContractError("initial_theta length must equal n_items");
  }
  if (options.alpha == 0.0) {
    const auto report = is_connected(dataset);
    if (!report.strongly_connected) {
      const auto groups = report.strong_groups();
      throw NonIdentifiableError(
          "comparison graph is not strongly connected; components: " +
              describe_groups(groups),
          groups);
    }
  }
}

std::vector<double> initial_theta(const ComparisonDataset& dataset,
                                  const EstimatorOptions& options) {
  std::vector<double> theta = options.initial_theta.value_or(
      std::vector<double>(static_cast<std::size_t>(dataset.n_items()), 0.0));
  center(theta);
  return theta;
}

void finish(StrengthEstimate& estimate, const EstimatorOptions& options) {
  try {
    estimate.normalized_scores =
        normalize_scores(estimate.theta, options.normalize_on);
  } catch (const DegenerateScaleError&) {
    estimate.normalized_scores.clear();
  }
}

}  // namespace

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::Observed ? "observed" : "synthetic";
}

Provenance parse_provenance(std::string_view text) {
  if (text == "observed") return Provenance::Observed;
  if (text == "synthetic") return Provenance::Synthetic;
  throw ContractError("unknown provenance '" + std::string(text) + "'");
}

std::string_view to_string(NormalizeOn mode) {
  return mode == NormalizeOn::Log ? "log" : "natural";
}

NormalizeOn parse_normalize_on(std::string_view text) {
  if (text == "log") return NormalizeOn::Log;
  if (text == "natural") return NormalizeOn::Natural;
  throw ConfigError("normalize_on must be 'log' or 'natural', got '" +
                    std::string(text) + "'");
}

ComparisonDataset::ComparisonDataset(int n_items) : n_items_(n_items) {
  if (n_items < 1) throw ContractError("n_items must be positive");
}

void ComparisonDataset::add(int winner, int loser, Provenance provenance,
                            int count) {
  if (winner < 0 || winner >= n_items_ || loser < 0 || loser >= n_items_) {
    throw ContractError("outcome item index out of range");
  }
  if (winner == loser) throw ContractError("an item cannot beat itself");
  if (count < 0) throw ContractError("outcome count must be non-negative");
  for (int k = 0; k < count; ++k) outcomes_.push_back({winner, loser, provenance});
}

std::size_t ComparisonDataset::count(Provenance provenance) const {
  return static_cast<std::size_t>(
      std::count_if(outcomes_.begin(), outcomes_.end(),
                    [&](const Outcome& o) { return o.provenance == provenance; }));
}

std::vector<double> ComparisonDataset::win_matrix() const {
  const auto n = static_cast<std::size_t>(n_items_);
  std::vector<double> wins(n * n, 0.0);
  for (const auto& o : outcomes_) {
    wins[static_cast<std::size_t>(o.winner) * n +
         static_cast<std::size_t>(o.loser)] += 1.0;
  }
  return wins;
}

double win_probability(double theta_i, double theta_j) {
  const double d = theta_i - theta_j;
  if (d >= 0.0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

double log_likelihood(const ComparisonDataset& dataset,
                      std::span<const double> theta) {
  return regularized_log_likelihood(dataset, theta, 0.0);
}

double regularized_log_likelihood(const ComparisonDataset& dataset,
                                  std::span<const double> theta, double alpha) {
  if (theta.size() != static_cast<std::size_t>(dataset.n_items())) {
    throw ContractError("theta length must equal n_items");
  }
  double total = 0.0;
  for (const auto& o : dataset.outcomes()) {
    total += log_win_probability(theta[static_cast<std::size_t>(o.winner)],
                                 theta[static_cast<std::size_t>(o.loser)]);
  }
  if (alpha > 0.0) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      for (std::size_t j = 0; j < theta.size(); ++j) {
        if (i != j) total += alpha * log_win_probability(theta[i], theta[j]);
      }
    }
  }
  return total;
}

StrengthEstimate estimate_ilsr(const ComparisonDataset& dataset,
                               const EstimatorOptions& options) {
  check_preconditions(dataset, options);
  const int n = dataset.n_items();
  const auto wins = dataset.win_matrix();
  const auto at = [n](int i, int j) {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
           static_cast<std::size_t>(j);
  };

  StrengthEstimate estimate;
  estimate.theta = initial_theta(dataset, options);
  Eigen::MatrixXd balance(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(n - 1) = 1.0;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    std::vector<double> strength(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      strength[static_cast<std::size_t>(i)] =
          std::exp(estimate.theta[static_cast<std::size_t>(i)]);
    }
    // Generator Q: Q(j, i) is the rate of moving j -> i, i.e. wins of i over
    // j scaled by 1 / (pi_i + pi_j). The stationary p solves Q^T p = 0.
    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        const double count = wins[at(i, j)] + options.alpha;
        if (count == 0.0) continue;
        const double rate = count / (strength[static_cast<std::size_t>(i)] +
                                     strength[static_cast<std::size_t>(j)]);
        generator(j, i) += rate;
        generator(j, j) -= rate;
      }
    }
    balance = generator.transpose();
    balance.row(n - 1).setOnes();
    const Eigen::VectorXd stationary = balance.colPivHouseholderQr().solve(rhs);

    std::vector<double> next(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      next[static_cast<std::size_t>(i)] = std::log(
          std::max(stationary(i), std::numeric_limits<double>::min()));
    }
    center(next);
    const double change = max_abs_diff(next, estimate.theta);
    estimate.theta = std::move(next);
    estimate.iterations = iter;
    if (options.observer) options.observer(iter, estimate.theta);
    if (change < options.tol) {
      estimate.converged = true;
      break;
    }
  }
  finish(estimate, options);
  return estimate;
}

StrengthEstimate estimate_mm(const ComparisonDataset& dataset,
                             const EstimatorOptions& options) {
  check_preconditions(dataset, options);
  const auto n = static_cast<std::size_t>(dataset.n_items());
  const auto wins = dataset.win_matrix();

  std::vector<double> total_wins(n, 0.0);
  std::vector<double> pair_counts(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      total_wins[i] += wins[i * n + j] + options.alpha;
      pair_counts[i * n + j] = wins[i * n + j] + wins[j * n + i] + 2.0 * options.alpha;
    }
  }

  StrengthEstimate estimate;
  estimate.theta = initial_theta(dataset, options);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    std::vector<double> strength(n);
    for (std::size_t i = 0; i < n; ++i) strength[i] = std::exp(estimate.theta[i]);

    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      double denominator = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && pair_counts[i * n + j] > 0.0) {
          denominator += pair_counts[i * n + j] / (strength[i] + strength[j]);
        }
      }
      const double updated =
          denominator > 0.0 ? total_wins[i] / denominator : strength[i];
      next[i] = std::log(std::max(updated, std::numeric_limits<double>::min()));
    }
    center(next);
    const double change = max_abs_diff(next, estimate.theta);
    estimate.theta = std::move(next);
    estimate.iterations = iter;
    if (options.observer) options.observer(iter, estimate.theta);
    if (change < options.tol) {
      estimate.converged = true;
      break;
    }
  }
  finish(estimate, options);
  return estimate;
}

std::vector<double> normalize_scores(std::span<const double> theta,
                                     NormalizeOn mode) {
  if (theta.size() < 2) {
    throw ContractError("normalization needs at least two items");
  }
  std::vector<double> values(theta.begin(), theta.end());
  if (mode == NormalizeOn::Natural) {
    // Shift by the max before exponentiating; min-max is scale invariant.
    const double top = *std::max_element(values.begin(), values.end());
    for (double& v : values) v = std::exp(v - top);
  }
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw DegenerateScaleError("all strengths are equal; no preference signal");
  }
  std::vector<double> scores(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double unit = (values[i] - lo) / (hi - lo);
    scores[i] = 6.0 * unit - 3.0;
  }
  return scores;
}

std::vector<std::vector<int>> ConnectivityReport::strong_groups() const {
  return group_by_label(strong_component);
}

std::vector<std::vector<int>> ConnectivityReport::weak_groups() const {
  return group_by_label(weak_component);
}

ConnectivityReport is_connected(const ComparisonDataset& dataset) {
  const auto n = static_cast<std::size_t>(dataset.n_items());
  std::vector<std::vector<int>> forward(n), backward(n);
  for (const auto& o : dataset.outcomes()) {
    forward[static_cast<std::size_t>(o.loser)].push_back(o.winner);
    backward[static_cast<std::size_t>(o.winner)].push_back(o.loser);
  }

  // Kosaraju: finishing order on the forward graph, then sweep the reverse.
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{static_cast<int>(root), 0}};
    seen[root] = 1;
    while (!stack.empty()) {
      auto& [node, next_edge] = stack.back();
      const auto& edges = forward[static_cast<std::size_t>(node)];
      if (next_edge < edges.size()) {
        const int to = edges[next_edge++];
        if (!seen[static_cast<std::size_t>(to)]) {
          seen[static_cast<std::size_t>(to)] = 1;
          stack.push_back({to, 0});
        }
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
  }

  std::vector<int> strong(n, -1);
  int label = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (strong[static_cast<std::size_t>(*it)] >= 0) continue;
    std::vector<int> stack{*it};
    strong[static_cast<std::size_t>(*it)] = label;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int to : backward[static_cast<std::size_t>(node)]) {
        if (strong[static_cast<std::size_t>(to)] < 0) {
          strong[static_cast<std::size_t>(to)] = label;
          stack.push_back(to);
        }
      }
    }
    ++label;
  }

  std::vector<int> weak(n, -1);
  label = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (weak[root] >= 0) continue;
    std::vector<int> stack{static_cast<int>(root)};
    weak[root] = label;
    while (!stack.empty()) {
      const auto node = static_cast<std::size_t>(stack.back());
      stack.pop_back();
      for (const auto* edges : {&forward[node], &backward[node]}) {
        for (int to : *edges) {
          if (weak[static_cast<std::size_t>(to)] < 0) {
            weak[static_cast<std::size_t>(to)] = label;
            stack.push_back(to);
          }
        }
      }
    }
    ++label;
  }

  ConnectivityReport report;
  report.strong_component = canonical_labels(strong);
  report.weak_component = canonical_labels(weak);
  report.strongly_connected = std::all_of(
      report.strong_component.begin(), report.strong_component.end(),
      [](int c) { return c == 0; });
  report.weakly_connected =
      std::all_of(report.weak_component.begin(), report.weak_component.end(),
                  [](int c) { return c == 0; });
  return report;
}

std::string dataset_to_csv(const ComparisonDataset& dataset) {
  std::ostringstream os;
  os << "winner_id,loser_id,provenance\n";
  for (const auto& o : dataset.outcomes()) {
    os << o.winner << ',' << o.loser << ',' << to_string(o.provenance) << '\n';
  }
  return os.str();
}

ComparisonDataset dataset_from_csv(const std::string& text,
                                   std::optional<int> n_items) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw ContractError("dataset CSV is missing its header");
  csv::expect_header(rows.front(), {"winner_id", "loser_id", "provenance"});

  std::vector<Outcome> outcomes;
  int max_id = -1;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 3) {
      throw ContractError("dataset row " + std::to_string(r) +
                          " must have 3 fields");
    }
    Outcome o{csv::to_int(row[0]), csv::to_int(row[1]),
              parse_provenance(row[2])};
    max_id = std::max({max_id, o.winner, o.loser});
    outcomes.push_back(o);
  }
  ComparisonDataset dataset(n_items.value_or(std::max(max_id + 1, 1)));
  for (const auto& o : outcomes) dataset.add(o.winner, o.loser, o.provenance);
  return dataset;
}

std::string estimate_to_csv(const StrengthEstimate& estimate,
                            const EstimatorOptions& options) {
  std::ostringstream os;
  os << "# alpha=" << csv::format(options.alpha) << '\n'
     << "# tol=" << csv::format(options.tol) << '\n'
     << "# max_iter=" << options.max_iter << '\n'
     << "# normalize_on=" << to_string(options.normalize_on) << '\n'
     << "# iterations=" << estimate.iterations << '\n'
     << "# converged=" << (estimate.converged ? "true" : "false") << '\n';
  os << "item_id,theta,normalized_score\n";
  for (std::size_t i = 0; i < estimate.theta.size(); ++i) {
    os << i << ',' << csv::format(estimate.theta[i]) << ',';
    if (!estimate.normalized_scores.empty()) {
      os << csv::format(estimate.normalized_scores[i]);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace elicit
