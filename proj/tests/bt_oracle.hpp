#pragma once

// Test-only brute-force Bradley-Terry maximizer. Shares no code with the
// estimators: its own likelihood, a coarse grid for the start point, then a
// compass search with shrinking steps over the gauge-fixed parameters
// (theta[n-1] = 0). The regularized log-likelihood is strictly concave, so
// the compass search converges to the unique maximum.

#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

struct Win {
  int winner;
  int loser;
};

inline double objective(const std::vector<Win>& wins, int n, double alpha,
                        const std::vector<double>& theta) {
  auto log_p = [&](int i, int j) {
    const double d = theta[j] - theta[i];
    return -(d > 0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d)));
  };
  double total = 0.0;
  for (const auto& w : wins) total += log_p(w.winner, w.loser);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) total += alpha * log_p(i, j);
    }
  }
  return total;
}

inline std::vector<double> centered(std::vector<double> theta) {
  double mean = 0.0;
  for (double t : theta) mean += t;
  mean /= static_cast<double>(theta.size());
  for (double& t : theta) t -= mean;
  return theta;
}

/// Returns the centered maximizer and the objective value there.
inline std::pair<std::vector<double>, double> maximize(const std::vector<Win>& wins,
                                                       int n, double alpha) {
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  double best_value = objective(wins, n, alpha, best);

  // Coarse grid over the free coordinates, step 1 on [-4, 4].
  const int free = n - 1;
  std::vector<int> index(static_cast<std::size_t>(free), -4);
  while (true) {
    std::vector<double> theta(static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < free; ++k) theta[static_cast<std::size_t>(k)] = index[static_cast<std::size_t>(k)];
    const double value = objective(wins, n, alpha, theta);
    if (value > best_value) {
      best_value = value;
      best = theta;
    }
    int k = 0;
    while (k < free && ++index[static_cast<std::size_t>(k)] > 4) {
      index[static_cast<std::size_t>(k)] = -4;
      ++k;
    }
    if (k == free) break;
  }

  for (double step = 0.5; step > 1e-10;) {
    bool improved = false;
    for (int k = 0; k < free; ++k) {
      for (double dir : {1.0, -1.0}) {
        auto trial = best;
        trial[static_cast<std::size_t>(k)] += dir * step;
        const double value = objective(wins, n, alpha, trial);
        if (value > best_value) {
          best_value = value;
          best = std::move(trial);
          improved = true;
        }
      }
    }
    if (!improved) step /= 2.0;
  }
  return {centered(best), best_value};
}

}  // namespace oracle
