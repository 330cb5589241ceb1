#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "resilsim/metrics.hpp"

using namespace resilsim;

namespace {

// Composite Simpson over [0, upper], independent of the library quadrature.
template <class F>
double simpson(F f, double upper, int n = 20000) {
  const double h = upper / n;
  double s = f(0.0) + f(upper);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(Lifetime, ExponentialForms) {
  const auto d = LifetimeDistribution::exponential(0.01);
  EXPECT_NEAR(reliability_at(d, 100.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(unreliability_at(d, 100.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(hazard_rate_at(d, 37.0), 0.01, 1e-15);
  EXPECT_DOUBLE_EQ(mttf(d), 100.0);
  EXPECT_DOUBLE_EQ(fit_rate(mttf(d)), 1e7);
}

TEST(Lifetime, HazardIsDensityOverReliability) {
  const auto w = LifetimeDistribution::weibull(2.0, 50.0);
  for (double t : {1.0, 10.0, 40.0, 90.0}) {
    EXPECT_NEAR(hazard_rate_at(w, t), density_at(w, t) / reliability_at(w, t), 1e-12);
    EXPECT_NEAR(hazard_rate_at(w, t), 2.0 / 50.0 * (t / 50.0), 1e-12);
  }
}

TEST(Lifetime, MttfEqualsIntegralOfReliability) {
  for (const auto& d : {LifetimeDistribution::exponential(0.02), LifetimeDistribution::weibull(1.5, 200.0),
                        LifetimeDistribution::weibull(0.8, 30.0)}) {
    const double upper = quantile(d, 1.0 - 1e-12);
    const double oracle = simpson([&](double t) { return reliability_at(d, t); }, upper, 200000);
    EXPECT_NEAR(integrate_reliability(d), oracle, 1e-5 * oracle);
    EXPECT_NEAR(mttf(d), oracle, 1e-5 * oracle);
  }
}

TEST(Lifetime, EmpiricalUsesSurvivorCount) {
  const auto d = LifetimeDistribution::empirical({5.0, 1.0, 3.0, 7.0});
  // Survivors strictly beyond t, counted by hand.
  EXPECT_DOUBLE_EQ(reliability_at(d, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(reliability_at(d, 2.0), 0.75);
  EXPECT_DOUBLE_EQ(reliability_at(d, 5.0), 0.25);
  EXPECT_DOUBLE_EQ(reliability_at(d, 8.0), 0.0);
  EXPECT_DOUBLE_EQ(mttf(d), 4.0);
  EXPECT_DOUBLE_EQ(integrate_reliability(d), 4.0);
}

TEST(Lifetime, InvalidInputs) {
  EXPECT_THROW(LifetimeDistribution::exponential(0.0), Error);
  EXPECT_THROW(LifetimeDistribution::weibull(-1.0, 1.0), Error);
  EXPECT_THROW(LifetimeDistribution::empirical({}), Error);
  EXPECT_THROW(reliability_at(LifetimeDistribution::exponential(1.0), -1.0), Error);
  EXPECT_THROW(fit_rate(0.0), Error);
}

TEST(Lifetime, SampledMeanMatchesMttf) {
  const auto d = LifetimeDistribution::weibull(1.5, 100.0);
  RandomStream rng(3, "test/weibull");
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) sum += sample(d, rng);
  const double mean = sum / n;
  const double sd = 100.0 * std::sqrt(std::tgamma(1.0 + 2.0 / 1.5) - std::pow(std::tgamma(1.0 + 1.0 / 1.5), 2));
  EXPECT_NEAR(mean, mttf(d), 4.0 * sd / std::sqrt(n));
}

TEST(Composition, SerialAndParallel) {
  const std::vector<double> r{0.9, 0.8, 0.95};
  EXPECT_NEAR(serial_reliability(r), 0.9 * 0.8 * 0.95, 1e-15);
  EXPECT_NEAR(parallel_reliability(r), 1.0 - 0.1 * 0.2 * 0.05, 1e-15);
  EXPECT_THROW(serial_reliability(std::vector<double>{}), Error);
  EXPECT_THROW(serial_reliability(std::vector<double>{1.2}), Error);
}

TEST(Composition, IdenticalFormsAreBitIdentical) {
  for (double r : {0.1, 0.5, 0.9, 0.999, 0.123456789}) {
    for (unsigned n = 1; n <= 12; ++n) {
      const std::vector<double> parts(n, r);
      EXPECT_EQ(identical_serial_reliability(r, n), serial_reliability(parts));
      EXPECT_EQ(identical_parallel_reliability(r, n), parallel_reliability(parts));
    }
  }
}

TEST(Availability, FromTimesAndMttf) {
  EXPECT_DOUBLE_EQ(availability_from_times(90.0, 5.0, 5.0), 0.9);
  EXPECT_DOUBLE_EQ(availability_from_mttf(99.0, 1.0), 0.99);
  EXPECT_DOUBLE_EQ(mtbf(99.0, 1.0), 100.0);
  EXPECT_THROW(availability_from_times(0.0, 0.0, 0.0), Error);
  const auto rec = make_availability_record(90.0, 10.0, 0.0, 5);
  EXPECT_DOUBLE_EQ(rec.mttf, 18.0);
  EXPECT_DOUBLE_EQ(rec.mttr, 2.0);
  EXPECT_DOUBLE_EQ(rec.mtbf, 20.0);
}

TEST(Nines, TableRows) {
  struct Row {
    double a;
    int nines;
    const char* text;
  };
  const Row rows[] = {{0.9, 1, "36 days, 12 hours"},
                      {0.99, 2, "87 hours, 36 minutes"},
                      {0.999, 3, "8 hours, 45.6 minutes"},
                      {0.9999, 4, "52 minutes, 33.6 seconds"},
                      {0.99999, 5, "5 minutes, 15.4 seconds"},
                      {0.999999, 6, "31.5 seconds"}};
  for (const auto& row : rows) {
    const auto n = nines_rating(row.a);
    EXPECT_EQ(n.nines, row.nines) << row.a;
    EXPECT_EQ(n.downtime, row.text) << row.a;
    EXPECT_NEAR(n.downtime_hours, (1.0 - row.a) * 8760.0, 1e-9);
  }
  EXPECT_THROW(nines_rating(1.0), Error);
}

TEST(Detection, PrecisionRecallAndComplements) {
  const DetectionTally t{80, 20, 0, 10};
  EXPECT_DOUBLE_EQ(precision(t), 0.8);
  EXPECT_DOUBLE_EQ(recall(t), 80.0 / 90.0);
  EXPECT_NEAR(precision(t), precision_complement(t), 1e-15);
  EXPECT_NEAR(recall(t), recall_complement(t), 1e-15);
  EXPECT_THROW(precision(DetectionTally{}), Error);
  EXPECT_THROW(recall(DetectionTally{}), Error);
}

TEST(Perspective, SystemVsApplication) {
  PerspectiveLog log{100.0, {}, {{"app", {{50.0, 52.0}}}}};
  const auto m = perspective_metrics(log);
  EXPECT_TRUE(m.smttf.lower_bound);
  EXPECT_DOUBLE_EQ(m.smttf.value, 100.0);
  EXPECT_DOUBLE_EQ(m.smttr.value, 0.0);
  EXPECT_DOUBLE_EQ(m.amttf.at("app").value, 98.0);
  EXPECT_DOUBLE_EQ(m.amttr.at("app").value, 2.0);
}
