#include "elicit/bt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "bt_oracle.hpp"
#include "elicit/errors.hpp"

using namespace elicit;

namespace {

// Root of 3e^a/(e^a+1) + 2e^{2a}/(e^{2a}+1) = 4, the score equation of the
// three-item example below (item B sits at 0 by symmetry), solved by brentq.
constexpr double kThreeItemSpread = 1.0457268824326436;

ComparisonDataset three_item_dataset() {
  ComparisonDataset d(3);
  d.add(0, 1, Provenance::Observed, 3);
  d.add(1, 2, Provenance::Observed, 3);
  d.add(0, 2);
  d.add(2, 0);
  return d;
}

std::vector<oracle::Win> to_wins(const ComparisonDataset& d) {
  std::vector<oracle::Win> wins;
  for (const auto& o : d.outcomes()) wins.push_back({o.winner, o.loser});
  return wins;
}

EstimatorOptions unregularized() {
  EstimatorOptions options;
  options.alpha = 0.0;
  options.tol = 1e-12;
  options.max_iter = 100000;
  return options;
}

ComparisonDataset random_dataset(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> items(2, 5);
  std::uniform_int_distribution<int> outcomes(0, 30);
  const int n = items(rng);
  ComparisonDataset d(n);
  const int count = outcomes(rng);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < count; ++k) {
    const int w = pick(rng);
    int l = pick(rng);
    while (l == w) l = pick(rng);
    d.add(w, l);
  }
  return d;
}

}  // namespace

TEST(WinProbability, EqualStrengthsAreEven) {
  EXPECT_DOUBLE_EQ(win_probability(0.0, 0.0), 0.5);
}

TEST(WinProbability, TwoToOne) {
  EXPECT_NEAR(win_probability(std::log(2.0), std::log(1.0)), 2.0 / 3.0, 1e-15);
}

TEST(WinProbability, ExtremeGapStaysInsideUnitInterval) {
  EXPECT_NEAR(win_probability(10.0, -10.0), 0.9999999979388463, 1e-16);
  for (double gap : {40.0, 400.0, 4000.0}) {
    const double p = win_probability(gap, -gap);
    const double q = win_probability(-gap, gap);
    EXPECT_FALSE(std::isnan(p));
    EXPECT_FALSE(std::isnan(q));
    EXPECT_LE(p, 1.0);
    EXPECT_GE(q, 0.0);
  }
}

TEST(WinProbability, ComplementAndShiftInvariance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int k = 0; k < 1000; ++k) {
    const double a = u(rng), b = u(rng), c = u(rng);
    EXPECT_NEAR(win_probability(a, b) + win_probability(b, a), 1.0, 1e-15);
    EXPECT_NEAR(win_probability(a + c, b + c), win_probability(a, b), 1e-12);
  }
}

TEST(LogLikelihood, SingleEvenOutcome) {
  ComparisonDataset d(2);
  d.add(0, 1);
  const std::vector<double> theta{0.0, 0.0};
  EXPECT_NEAR(log_likelihood(d, theta), std::log(0.5), 1e-15);
}

TEST(LogLikelihood, EmptyDatasetIsZero) {
  const std::vector<double> theta{0.3, -0.3};
  EXPECT_EQ(log_likelihood(ComparisonDataset(2), theta), 0.0);
}

TEST(LogLikelihood, TwoWinsAtTwoToOne) {
  ComparisonDataset d(2);
  d.add(0, 1, Provenance::Observed, 2);
  const std::vector<double> theta{std::log(2.0), 0.0};
  EXPECT_NEAR(log_likelihood(d, theta), -0.8109302162163289, 1e-14);
}

TEST(LogLikelihood, LengthMismatchIsContractError) {
  const std::vector<double> theta{0.0};
  EXPECT_THROW(log_likelihood(ComparisonDataset(2), theta), ContractError);
}

TEST(Dataset, RejectsSelfComparisonAndBadIndex) {
  ComparisonDataset d(3);
  EXPECT_THROW(d.add(1, 1), ContractError);
  EXPECT_THROW(d.add(0, 3), ContractError);
  EXPECT_THROW(d.add(-1, 0), ContractError);
  EXPECT_EQ(d.size(), 0u);
}

TEST(Ilsr, TwoItemClosedForm) {
  ComparisonDataset d(2);
  d.add(0, 1, Provenance::Observed, 2);
  d.add(1, 0);
  const auto e = estimate_ilsr(d, unregularized());
  ASSERT_TRUE(e.converged);
  EXPECT_NEAR(std::exp(e.theta[0] - e.theta[1]), 2.0, 1e-9);
  EXPECT_NEAR(e.theta[0], 0.5 * std::log(2.0), 1e-9);
  EXPECT_NEAR(e.theta[1], -0.5 * std::log(2.0), 1e-9);
}

TEST(Ilsr, SymmetricDataGivesZero) {
  ComparisonDataset d(2);
  d.add(0, 1);
  d.add(1, 0);
  const auto e = estimate_ilsr(d, unregularized());
  EXPECT_NEAR(e.theta[0], 0.0, 1e-12);
  EXPECT_NEAR(e.theta[1], 0.0, 1e-12);
}

TEST(Ilsr, ThreeItemsMatchesClosedFormAndGridOracle) {
  const auto d = three_item_dataset();
  const auto e = estimate_ilsr(d, unregularized());
  EXPECT_NEAR(e.theta[0], kThreeItemSpread, 1e-8);
  EXPECT_NEAR(e.theta[1], 0.0, 1e-8);
  EXPECT_NEAR(e.theta[2], -kThreeItemSpread, 1e-8);

  const auto [best, value] = oracle::maximize(to_wins(d), 3, 0.0);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e.theta[i], best[i], 1e-3);
}

TEST(Ilsr, DisconnectedWithoutRegularizationNamesComponents) {
  ComparisonDataset d(4);
  d.add(0, 1);
  d.add(1, 0);
  d.add(2, 3);
  d.add(3, 2);
  try {
    estimate_ilsr(d, unregularized());
    FAIL() << "expected NonIdentifiableError";
  } catch (const NonIdentifiableError& e) {
    ASSERT_EQ(e.components().size(), 2u);
    EXPECT_EQ(e.components()[0], (std::vector<int>{0, 1}));
    EXPECT_EQ(e.components()[1], (std::vector<int>{2, 3}));
    EXPECT_NE(std::string(e.what()).find("{0,1}"), std::string::npos);
  }
}

TEST(Ilsr, MaxIterReachedReportsNotConverged) {
  auto options = unregularized();
  options.max_iter = 1;
  options.tol = 1e-300;
  const auto e = estimate_ilsr(three_item_dataset(), options);
  EXPECT_FALSE(e.converged);
  EXPECT_EQ(e.iterations, 1);
  EXPECT_EQ(e.theta.size(), 3u);
}

TEST(Ilsr, TranslationInvariantInInitialTheta) {
  const auto d = three_item_dataset();
  const auto base = estimate_ilsr(d, unregularized());
  auto shifted = unregularized();
  shifted.initial_theta = std::vector<double>{7.5, 7.5, 7.5};
  const auto e = estimate_ilsr(d, shifted);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(e.theta[i], base.theta[i], 1e-12);
}

TEST(Mm, AgreesWithIlsrOnTheNamedExamples) {
  ComparisonDataset two(2);
  two.add(0, 1, Provenance::Observed, 2);
  two.add(1, 0);
  ComparisonDataset even(2);
  even.add(0, 1);
  even.add(1, 0);
  for (const auto& d : {two, even, three_item_dataset()}) {
    const auto a = estimate_ilsr(d, unregularized());
    const auto b = estimate_mm(d, unregularized());
    ASSERT_TRUE(b.converged);
    for (std::size_t i = 0; i < a.theta.size(); ++i) {
      EXPECT_NEAR(a.theta[i], b.theta[i], 1e-4);
    }
  }
}

TEST(Mm, RegularizationKeepsUndefeatedItemFinite) {
  ComparisonDataset d(2);
  d.add(0, 1);
  EstimatorOptions options;
  options.alpha = 0.01;
  const auto e = estimate_mm(d, options);
  ASSERT_TRUE(e.converged);
  EXPECT_TRUE(std::isfinite(e.theta[0]));
  EXPECT_GT(e.theta[0], e.theta[1]);
  // Closed form for two items: pi_0 / pi_1 = (1 + alpha) / alpha.
  EXPECT_NEAR(e.theta[0] - e.theta[1], std::log(1.01 / 0.01), 1e-6);
  const auto f = estimate_ilsr(d, options);
  EXPECT_NEAR(f.theta[0] - f.theta[1], std::log(1.01 / 0.01), 1e-6);
}

TEST(Mm, LikelihoodNeverDecreasesAcrossIterations) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_dataset(rng);
    EstimatorOptions options;
    options.alpha = 0.05;
    double previous = -INFINITY;
    bool ok = true;
    options.observer = [&](int, std::span<const double> theta) {
      const double value = regularized_log_likelihood(d, theta, options.alpha);
      if (value < previous - 1e-9) ok = false;
      previous = value;
    };
    estimate_mm(d, options);
    EXPECT_TRUE(ok) << "trial " << trial;
  }
}

TEST(Estimators, OracleAgreementOnRandomSmallInstances) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const auto d = random_dataset(rng);
    EstimatorOptions options;
    options.alpha = 0.05;
    options.tol = 1e-10;
    options.max_iter = 200000;
    const auto a = estimate_ilsr(d, options);
    const auto b = estimate_mm(d, options);
    const auto [best, value] = oracle::maximize(to_wins(d), d.n_items(), 0.05);
    for (int i = 0; i < d.n_items(); ++i) {
      EXPECT_NEAR(a.theta[i], b.theta[i], 1e-4) << "trial " << trial;
      EXPECT_NEAR(a.theta[i], best[i], 1e-3) << "trial " << trial;
    }
    EXPECT_NEAR(regularized_log_likelihood(d, a.theta, 0.05), value, 1e-6);
  }
}

TEST(Estimators, ExtraWinNeverLowersTheWinnersMargin) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    auto d = random_dataset(rng);
    EstimatorOptions options;
    options.alpha = 0.05;
    options.tol = 1e-11;
    const auto before = estimate_ilsr(d, options);
    const int i = static_cast<int>(rng() % static_cast<unsigned>(d.n_items()));
    const int j = (i + 1) % d.n_items();
    d.add(i, j);
    const auto after = estimate_ilsr(d, options);
    EXPECT_GE(after.theta[i] - after.theta[j],
              before.theta[i] - before.theta[j] - 1e-9);
  }
}

TEST(Normalize, ArithmeticSequence) {
  const std::vector<double> theta{0.0, 1.0, 2.0};
  EXPECT_EQ(normalize_scores(theta), (std::vector<double>{-3.0, 0.0, 3.0}));
}

TEST(Normalize, TwoItems) {
  const std::vector<double> theta{5.0, -5.0};
  EXPECT_EQ(normalize_scores(theta), (std::vector<double>{3.0, -3.0}));
}

TEST(Normalize, DegenerateThrows) {
  const std::vector<double> theta{0.4, 0.4, 0.4};
  EXPECT_THROW(normalize_scores(theta), DegenerateScaleError);
  EXPECT_THROW(normalize_scores(std::vector<double>{1.0}), ContractError);
}

TEST(Normalize, NaturalScaleKeepsOrderButChangesSpacing) {
  const std::vector<double> theta{0.0, 1.0, 2.0};
  const auto natural = normalize_scores(theta, NormalizeOn::Natural);
  EXPECT_EQ(natural.front(), -3.0);
  EXPECT_EQ(natural.back(), 3.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(natural[1], 6.0 * (e - 1.0) / (e * e - 1.0) - 3.0, 1e-12);
}

TEST(Normalize, PreservesOrderAndHitsBothEndsExactly) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> theta(2 + trial % 14);
    for (double& t : theta) t = g(rng);
    for (auto mode : {NormalizeOn::Log, NormalizeOn::Natural}) {
      const auto s = normalize_scores(theta, mode);
      EXPECT_EQ(*std::min_element(s.begin(), s.end()), -3.0);
      EXPECT_EQ(*std::max_element(s.begin(), s.end()), 3.0);
      for (std::size_t i = 0; i < theta.size(); ++i) {
        for (std::size_t j = 0; j < theta.size(); ++j) {
          if (theta[i] < theta[j]) EXPECT_LE(s[i], s[j]);
        }
      }
    }
  }
}

TEST(Connectivity, ThreeCycleIsStronglyConnected) {
  ComparisonDataset d(3);
  d.add(0, 1);
  d.add(1, 2);
  d.add(2, 0);
  const auto r = is_connected(d);
  EXPECT_TRUE(r.strongly_connected);
  EXPECT_TRUE(r.weakly_connected);
}

TEST(Connectivity, OneWayWinIsOnlyWeaklyConnected) {
  ComparisonDataset d(2);
  d.add(0, 1);
  const auto r = is_connected(d);
  EXPECT_FALSE(r.strongly_connected);
  EXPECT_TRUE(r.weakly_connected);
  EXPECT_EQ(r.strong_groups().size(), 2u);
}

TEST(Connectivity, FullRoundRobinBothWaysIsStronglyConnected) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    ComparisonDataset d(15);
    for (int i = 0; i < 15; ++i) {
      for (int j = i + 1; j < 15; ++j) {
        d.add(i, j, Provenance::Observed, 1 + static_cast<int>(rng() % 3));
        d.add(j, i, Provenance::Observed, 1 + static_cast<int>(rng() % 3));
      }
    }
    EXPECT_TRUE(is_connected(d).strongly_connected);
  }
}

TEST(Connectivity, IsolatedItemIsItsOwnWeakComponent) {
  ComparisonDataset d(3);
  d.add(0, 1);
  d.add(1, 0);
  const auto r = is_connected(d);
  EXPECT_FALSE(r.weakly_connected);
  EXPECT_EQ(r.weak_component, (std::vector<int>{0, 0, 1}));
}

TEST(DatasetCsv, RoundTripKeepsProvenance) {
  ComparisonDataset d(4);
  d.add(0, 1);
  d.add(3, 2, Provenance::Synthetic, 2);
  const auto back = dataset_from_csv(dataset_to_csv(d), 4);
  EXPECT_EQ(back, d);
}

TEST(DatasetCsv, RejectsMissingHeaderAndBadRows) {
  EXPECT_THROW(dataset_from_csv("0,1,observed\n"), ContractError);
  EXPECT_THROW(dataset_from_csv("winner_id,loser_id,provenance\n0,1\n"),
               ContractError);
  EXPECT_THROW(dataset_from_csv("winner_id,loser_id,provenance\n0,1,maybe\n"),
               ContractError);
}

TEST(EstimateCsv, CarriesRunMetadata) {
  const auto e = estimate_ilsr(three_item_dataset());
  const auto text = estimate_to_csv(e, EstimatorOptions{});
  EXPECT_NE(text.find("# alpha=0.01"), std::string::npos);
  EXPECT_NE(text.find("# converged=true"), std::string::npos);
  EXPECT_NE(text.find("item_id,theta,normalized_score\n0,"), std::string::npos);
}
