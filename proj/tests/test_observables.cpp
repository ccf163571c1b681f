#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qwalk/entanglement.hpp"
#include "qwalk/observables.hpp"
#include "test_support.hpp"

using namespace qwalk;
using qwalk::testing::random_state;

namespace {

WalkState hadamard_at(std::size_t t, std::size_t window) {
  const auto g = Geometry::line(window);
  auto s = initial_state(g);
  advance(s, CoinField::uniform(g), t);
  return s;
}

std::vector<WalkState> disordered_ensemble(const Geometry& g, double w, std::size_t n, std::size_t t,
                                           std::uint64_t master = 1) {
  std::vector<WalkState> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = initial_state(g);
    advance(s, sample_coin_field(g, w, derive_seed(master, 0, static_cast<std::uint32_t>(i))), t);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

TEST(Occupation, InitialIsDelta) {
  const auto p = occupation(initial_state(Geometry::line(4)));
  EXPECT_NEAR(p.at(0), 1.0, 1e-15);
  EXPECT_NEAR(p.total(), 1.0, 1e-15);
}

TEST(Occupation, HadamardTimeTwo) {
  const auto p = occupation(hadamard_at(2, 2));
  EXPECT_NEAR(p.at(-2), 0.25, 1e-15);
  EXPECT_NEAR(p.at(0), 0.5, 1e-15);
  EXPECT_NEAR(p.at(2), 0.25, 1e-15);
  EXPECT_EQ(p.at(-1), 0.0);
  EXPECT_EQ(p.at(1), 0.0);
}

TEST(Occupation, HadamardTimeHundredPeaksNearSeventy) {
  const auto p = occupation(hadamard_at(100, 100));
  long best = 0;
  for (long x = 0; x <= 100; ++x)
    if (p.at(x) > p.at(best)) best = x;
  EXPECT_NEAR(static_cast<double>(best), 70.0, 4.0);
  EXPECT_LT(p.at(0), 0.1 * p.at(best));
  EXPECT_NEAR(p.total(), 1.0, 1e-10);
}

TEST(EnsembleOccupation, SingleStateAndErrors) {
  const auto s = hadamard_at(10, 10);
  const std::vector<WalkState> one{s};
  EXPECT_EQ(ensemble_occupation(one).p, occupation(s).p);
  EXPECT_THROW(ensemble_occupation(std::span<const WalkState>{}), DomainError);
  const std::vector<WalkState> mixed{s, hadamard_at(9, 10)};
  EXPECT_THROW(ensemble_occupation(mixed), ContractViolation);
}

TEST(EnsembleOccupation, EqualsCoinTracedDiagonalOfEnsembleDensity) {
  const auto g = Geometry::line(30);
  const auto states = disordered_ensemble(g, 0.7, 40, 30);
  const auto p = ensemble_occupation(states);
  const auto rho = ensemble_density(states);
  for (std::size_t i = 0; i < g.sites(); ++i) {
    double diag = 0.0;
    if (i >= rho.site_begin && i < rho.site_begin + rho.site_count) {
      const auto k = static_cast<Eigen::Index>(2 * (i - rho.site_begin));
      diag = rho.matrix(k, k).real() + rho.matrix(k + 1, k + 1).real();
    }
    EXPECT_NEAR(p.p[i], diag, 1e-14);
  }
}

TEST(EnsembleOccupation, StrongDisorderHasCentralPeak) {
  const auto g = Geometry::line(100);
  const auto p = ensemble_occupation(disordered_ensemble(g, 1.0, 200, 100));
  for (long x = 2; x <= 100; x += 2) EXPECT_GT(p.at(0), p.at(x));
  EXPECT_GT(p.at(0), 0.1);
}

TEST(ReturnProbability, KnownValues) {
  EXPECT_NEAR(return_probability(occupation(initial_state(Geometry::line(2)))), 1.0, 1e-15);
  EXPECT_NEAR(return_probability(occupation(hadamard_at(2, 2))), 0.5, 1e-15);
}

TEST(FlatDistribution, LineAndFinite) {
  const auto g = Geometry::line(5);
  auto f = flat_distribution(g, 2);
  for (long x = -5; x <= 5; ++x) EXPECT_EQ(f.at(x), (x == -2 || x == 0 || x == 2) ? 1.0 / 3.0 : 0.0);
  f = flat_distribution(g, 0);
  EXPECT_EQ(f.at(0), 1.0);
  EXPECT_NEAR(f.total(), 1.0, 1e-15);
  const auto ring = flat_distribution(Geometry::ring(61), 17);
  for (double v : ring.p) EXPECT_EQ(v, 1.0 / 61.0);
  EXPECT_THROW(flat_distribution(g, 6), DomainError);
}

TEST(MixingRatio, KnownValues) {
  const auto g = Geometry::line(5);
  const auto flat = flat_distribution(g, 2);
  EXPECT_EQ(mixing_ratio(flat, flat), 0.0);
  const auto h5 = [&] {
    auto s = initial_state(g);
    advance(s, CoinField::uniform(g), 2);
    return occupation(s);
  }();
  EXPECT_NEAR(mixing_ratio(h5, flat), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(mixing_ratio(h5, flat_distribution(g, 0)), ContractViolation);
}

TEST(MixingRatio, NeverExceedsTwo) {
  std::mt19937_64 rng(5);
  const auto g = Geometry::ring(41);
  for (int k = 0; k < 200; ++k) {
    const auto p = occupation(random_state(g, rng));
    ProbDist q{g, 0, std::vector<double>(g.sites(), 0.0)};
    q.p[k % g.sites()] = 1.0;
    const double m = mixing_ratio(p, q);
    EXPECT_LE(m, 2.0);
    EXPECT_GE(m, 0.0);
  }
  // Disjoint supports hit the bound exactly.
  ProbDist a{g, 0, std::vector<double>(g.sites(), 0.0)}, b = a;
  a.p[0] = 1.0;
  b.p[1] = 1.0;
  EXPECT_EQ(mixing_ratio(a, b), 2.0);
}

TEST(Msd, KnownValues) {
  EXPECT_EQ(msd(occupation(initial_state(Geometry::line(3)))), 0.0);
  EXPECT_NEAR(msd(occupation(hadamard_at(1, 3))), 1.0, 1e-15);
  EXPECT_NEAR(msd(occupation(hadamard_at(2, 3))), 2.0, 1e-15);
}

TEST(Fidelity, Basics) {
  const auto ref = hadamard_at(30, 30);
  const std::vector<WalkState> same(5, ref);
  EXPECT_NEAR(fidelity(same, ref), 1.0, 1e-14);

  const auto g = Geometry::line(30);
  const std::vector<WalkState> start(3, initial_state(g));
  EXPECT_NEAR(fidelity(start, initial_state(g)), 1.0, 1e-15);

  const std::vector<WalkState> wrong_time{hadamard_at(29, 30)};
  EXPECT_THROW(fidelity(wrong_time, ref), DomainError);
}

TEST(Fidelity, DecaysFasterForStrongerDisorder) {
  const auto g = Geometry::line(100);
  const auto ref = hadamard_at(100, 100);
  const double weak = fidelity(disordered_ensemble(g, 0.2, 100, 100), ref);
  const double strong = fidelity(disordered_ensemble(g, 1.0, 100, 100), ref);
  EXPECT_LT(strong, weak);
  EXPECT_LT(strong, 0.05);
  EXPECT_GE(strong, 0.0);
  EXPECT_LE(weak, 1.0);
}

TEST(GrowthExponent, ExactPowerLaws) {
  MsdSeries quad, lin;
  for (std::size_t t = 0; t <= 200; ++t) {
    quad.times.push_back(t), lin.times.push_back(t);
    quad.msd.push_back(static_cast<double>(t * t));
    lin.msd.push_back(static_cast<double>(t));
  }
  for (const auto& pt : growth_exponent(quad)) EXPECT_NEAR(pt.sigma, 2.0, 1e-6);
  for (const auto& pt : growth_exponent(lin, 0.5)) EXPECT_NEAR(pt.sigma, 1.0, 1e-6);
  EXPECT_EQ(growth_exponent(quad).front().time, 1u);
}

TEST(GrowthExponent, Errors) {
  MsdSeries s;
  for (std::size_t t = 1; t <= 9; ++t) s.times.push_back(t), s.msd.push_back(1.0 * t);
  EXPECT_THROW(growth_exponent(s), DomainError);
  s.times.push_back(10), s.msd.push_back(0.0);
  EXPECT_THROW(growth_exponent(s), DomainError);
}

// t -> c t shifts ln t by ln c; sigma at matched points is unchanged.
TEST(GrowthExponent, InvariantUnderTimeRescaling) {
  MsdSeries a, b;
  for (std::size_t t = 1; t <= 300; ++t) {
    const double v = std::pow(static_cast<double>(t), 1.3) * (1.0 + 0.3 / (1.0 + 0.05 * t)) +
                     0.2 * std::sin(0.7 * t);
    a.times.push_back(t), a.msd.push_back(std::abs(v) + 1.0);
    b.times.push_back(3 * t), b.msd.push_back(std::abs(v) + 1.0);
  }
  const auto sa = growth_exponent(a);
  const auto sb = growth_exponent(b);
  ASSERT_EQ(sa.size(), sb.size());
  for (std::size_t k = 0; k < sa.size(); ++k) EXPECT_NEAR(sa[k].sigma, sb[k].sigma, 1e-3);
}
