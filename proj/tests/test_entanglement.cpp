#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "qwalk/entanglement.hpp"
#include "test_support.hpp"

using namespace qwalk;
using qwalk::testing::random_state;

namespace {

WalkState hadamard_at(std::size_t t) {
  const auto g = Geometry::line(std::max<std::size_t>(t, 1));
  auto s = initial_state(g);
  advance(s, CoinField::uniform(g), t);
  return s;
}

std::vector<WalkState> ensemble(const Geometry& g, double w, std::size_t n, std::size_t t) {
  std::vector<WalkState> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = initial_state(g);
    advance(s, sample_coin_field(g, w, derive_seed(9, 0, static_cast<std::uint32_t>(i))), t);
    out.push_back(std::move(s));
  }
  return out;
}

EnsembleDensity wrap(const Geometry& g, Eigen::MatrixXcd m) {
  const auto sites = static_cast<std::size_t>(m.rows() / 2);
  return EnsembleDensity{g, 0, 0, sites, 1, std::move(m)};
}

Eigen::MatrixXcd random_density(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) a(i, j) = {n(rng), n(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

TEST(ReducedCoinDensity, InitialStateIsPure) {
  const auto rho = reduced_coin_density(initial_state(Geometry::line(3)));
  const auto lam = rho.eigenvalues();
  EXPECT_NEAR(lam[0], 0.0, 1e-15);
  EXPECT_NEAR(lam[1], 1.0, 1e-15);
  EXPECT_NEAR(entanglement_entropy(rho), 0.0, 1e-15);
}

TEST(ReducedCoinDensity, HadamardStepOneIsMaximallyMixed) {
  const auto rho = reduced_coin_density(hadamard_at(1));
  EXPECT_LT((rho.matrix - 0.5 * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(entanglement_entropy(rho), std::log(2.0), 1e-15);
}

TEST(ReducedCoinDensity, UnitTraceAndBoundedEntropyForRandomStates) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 100; ++k) {
    const auto rho = reduced_coin_density(random_state(Geometry::ring(9), rng));
    EXPECT_NEAR(rho.trace(), 1.0, 1e-12);
    const double s = entanglement_entropy(rho);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, std::log(2.0) + 1e-15);
  }
}

TEST(EntanglementEntropy, HadamardPlateau) {
  EXPECT_NEAR(entanglement_entropy(reduced_coin_density(hadamard_at(100))), 0.605, 0.005);
}

TEST(EntanglementEntropy, RejectsInvalidDensities) {
  CoinDensity bad;
  bad.matrix << 0.7, 0.0, 0.0, 0.7;
  EXPECT_THROW(entanglement_entropy(bad), DomainError);
  bad.matrix << 1.1, 0.0, 0.0, -0.1;
  EXPECT_THROW(entanglement_entropy(bad), DomainError);
  CoinDensity tiny;
  tiny.matrix << 1.0 + 1e-11, 0.0, 0.0, -1e-11;
  EXPECT_NEAR(entanglement_entropy(tiny), 0.0, 1e-9);
}

TEST(MeanRealizationEntropy, Basics) {
  const auto s = hadamard_at(40);
  const std::vector<WalkState> one{s};
  const double single = entanglement_entropy(reduced_coin_density(s));
  EXPECT_EQ(mean_realization_entropy(one), single);
  const std::vector<WalkState> many(7, s);
  EXPECT_NEAR(mean_realization_entropy(many), single, 1e-15);
  EXPECT_THROW(mean_realization_entropy(std::span<const WalkState>{}), DomainError);
}

// Concavity of the von Neumann entropy.
TEST(MeanRealizationEntropy, BelowEntropyOfAveragedCoin) {
  const auto g = Geometry::line(60);
  for (double w : {0.3, 1.0}) {
    const auto states = ensemble(g, w, 50, 60);
    CoinDensity avg;
    for (const auto& s : states) avg.matrix += reduced_coin_density(s).matrix;
    avg.matrix /= static_cast<double>(states.size());
    EXPECT_LE(mean_realization_entropy(states), entanglement_entropy(avg) + 1e-12);
  }
}

TEST(EnsembleDensity, PureProjectorForOneState) {
  const std::vector<WalkState> one{hadamard_at(6)};
  const auto rho = ensemble_density(one);
  EXPECT_LT((rho.matrix * rho.matrix - rho.matrix).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(rho.matrix.trace().real(), 1.0, 1e-12);
  EXPECT_EQ(rho.site_count, 13u);
}

TEST(EnsembleDensity, TraceAndPurity) {
  const auto g = Geometry::line(20);
  const auto states = ensemble(g, 1.0, 1000, 20);
  const auto rho = ensemble_density(states);
  EXPECT_NEAR(rho.matrix.trace().real(), 1.0, 1e-10);
  EXPECT_LT((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((rho.matrix * rho.matrix).trace().real(), 1.0);
  EXPECT_GT(hermitian_eigenvalues(rho.matrix).minCoeff(), -1e-10);
  EXPECT_THROW(ensemble_density(std::span<const WalkState>{}), DomainError);
}

TEST(EnsembleDensity, SupportWindowLosesNothing) {
  // Full-window matrix built by hand has the same spectrum of the partial
  // transpose up to zeros.
  const auto g = Geometry::line(12);
  const auto states = ensemble(g, 0.5, 5, 8);
  const auto window = ensemble_density(states);
  const auto dim = static_cast<Eigen::Index>(2 * g.sites());
  Eigen::MatrixXcd full = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& s : states) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = s.amplitudes()[static_cast<std::size_t>(k)];
    full += v * v.adjoint();
  }
  full /= static_cast<double>(states.size());
  EXPECT_EQ(window.site_begin, g.index(-8));
  EXPECT_EQ(window.site_count, 17u);
  EXPECT_NEAR(negativity(window), negativity(wrap(g, full)), 1e-12);
}

TEST(PartialTranspose, InvolutionHermiticityTrace) {
  std::mt19937_64 rng(10);
  const auto rho = random_density(10, rng);
  const auto pt = partial_transpose(rho);
  EXPECT_EQ(partial_transpose(pt), rho);
  EXPECT_EQ(pt.trace(), rho.trace());
  EXPECT_LT((pt - pt.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(hermitian_eigenvalues(pt).sum(), 1.0, 1e-12);
  EXPECT_THROW(partial_transpose(Eigen::MatrixXcd(3, 3)), ContractViolation);
}

TEST(PartialTranspose, HadamardStepOneHasEigenvalueMinusHalf) {
  const std::vector<WalkState> one{hadamard_at(1)};
  const auto lam = hermitian_eigenvalues(partial_transpose(ensemble_density(one)));
  EXPECT_NEAR(lam.minCoeff(), -0.5, 1e-14);
  EXPECT_NEAR(lam.sum(), 1.0, 1e-14);
  int negatives = 0;
  for (double l : lam) negatives += l < -1e-12;
  EXPECT_EQ(negatives, 1);
}

TEST(Negativity, KnownValues) {
  const std::vector<WalkState> start{initial_state(Geometry::line(3))};
  EXPECT_NEAR(negativity(ensemble_density(start)), 0.0, 1e-10);
  const std::vector<WalkState> one{hadamard_at(1)};
  EXPECT_NEAR(negativity(ensemble_density(one)), 0.5, 1e-14);
  const std::vector<WalkState> late{hadamard_at(100)};
  EXPECT_NEAR(negativity(ensemble_density(late)), 0.45, 0.02);
}

TEST(Negativity, SeparableMixturesVanish) {
  std::mt19937_64 rng(11);
  const auto g = Geometry::ring(5);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(10, 10);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double q = u(rng);
      total += q;
      // Site index outer, coin inner.
      rho += q * kron(random_density(5, rng), random_density(2, rng));
    }
    rho /= total;
    EXPECT_NEAR(negativity(wrap(g, rho)), 0.0, 1e-10);
    EXPECT_GE(negativity(wrap(g, rho)), 0.0);
  }
}

// Pure states: N = sqrt(lambda (1 - lambda)) with lambda from the coin spectrum.
TEST(Negativity, PureStateCrossCheckWithCoinSpectrum) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 30; ++k) {
    const auto s = random_state(Geometry::ring(7), rng);
    const auto lam = reduced_coin_density(s).eigenvalues();
    const std::vector<WalkState> one{s};
    EXPECT_NEAR(negativity(ensemble_density(one)), std::sqrt(lam[0] * lam[1]), 1e-8);
  }
}

TEST(Negativity, DisorderedEnsembleDecays) {
  const auto g = Geometry::line(60);
  const auto early = ensemble(g, 1.0, 200, 10);
  const auto late = ensemble(g, 1.0, 200, 60);
  const double n_early = negativity(ensemble_density(early));
  const double n_late = negativity(ensemble_density(late));
  EXPECT_LT(n_late, n_early);
  EXPECT_LT(n_late, 0.45);
}

TEST(HermitianEigenvalues, NonFiniteInputIsNumericError) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(4, 4);
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(hermitian_eigenvalues(m), NumericError);
}
