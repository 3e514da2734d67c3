#include <gtest/gtest.h>

#include "entwit/bench.hpp"

using namespace entwit;

TEST(Spearman, PerfectAndReversed) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_NEAR(spearman(x, {2, 4, 6, 8, 10}).rho, 1.0, 1e-15);
  EXPECT_NEAR(spearman(x, {5, 4, 3, 2, 1}).rho, -1.0, 1e-15);
  EXPECT_EQ(spearman(x, {5, 4, 3, 2, 1}).p_value, 0.0);
}

TEST(Spearman, KnownValueWithTies) {
  // scipy.stats.spearmanr([1,2,3,4,5,6], [1,3,2,2,5,4]) -> 0.7537..., p = 0.0835...
  const auto r = spearman({1, 2, 3, 4, 5, 6}, {1, 3, 2, 2, 5, 4});
  EXPECT_NEAR(r.rho, 0.753702346348183, 1e-12);
  EXPECT_NEAR(r.p_value, 0.0835232813732598, 1e-9);
}

TEST(Spearman, ConstantSample) {
  const auto r = spearman({1, 2, 3}, {4, 4, 4});
  EXPECT_EQ(r.rho, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_THROW(spearman({1, 2}, {1}), ValidationError);
}

TEST(AverageRanks, Ties) {
  EXPECT_EQ(average_ranks({10, 20, 10, 30}), (std::vector<double>{1.5, 3, 1.5, 4}));
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
}

TEST(Bench, SeparableRowsHaveNoDetections) {
  BenchConfig cfg;
  cfg.family = "werner";
  cfg.grid = {0.1, 0.2, 0.3};
  cfg.repetitions = 3;
  cfg.trials = 40;
  const auto res = run_bench(cfg);
  for (const auto& row : res.rows) {
    EXPECT_EQ(row.violation_rate, 0.0);
    EXPECT_EQ(row.median_first_violation, 41.0);
  }
}

TEST(Bench, CsvDeterministicAndThreadIndependent) {
  BenchConfig cfg;
  cfg.family = "schmidt";
  cfg.grid = {0.2, 0.8};
  cfg.repetitions = 4;
  cfg.trials = 30;
  cfg.seed = 12;
  const auto a = bench_csv(run_bench(cfg));
  cfg.threads = 4;
  const auto b = bench_csv(run_bench(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "family,param,oracle,median_first_violation_trial,mean_first_violation_trial,violation_rate,"
            "repetitions,trials");
}

TEST(Bench, Validation) {
  BenchConfig cfg;
  EXPECT_THROW(run_bench(cfg), ValidationError);
  cfg.grid = {0.5};
  cfg.family = "nope";
  EXPECT_THROW(run_bench(cfg), ValidationError);
}

TEST(Bench, FormatDoubleRoundTrips) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
}
