#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "torspec/classical.hpp"
#include "torspec/error.hpp"

using namespace torspec;

namespace {

constexpr double kPi = std::numbers::pi;

SymbolCoefficients cosX() { return SymbolCoefficients(1, 1.0).withCoefficient(0, 1, 0, 0.5); }

std::vector<std::pair<int, int>> bruteDirections(int f) {
  std::vector<std::pair<int, int>> out;
  for (int m = -f; m <= f; ++m)
    for (int n = -f; n <= f; ++n) {
      if (std::gcd(std::abs(m), std::abs(n)) != 1) continue;
      if (m < 0 || (m == 0 && n < 0)) continue;
      out.emplace_back(m, n);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// Secular polynomial from the raw coefficients, sampled on 2^20 points.
std::pair<double, double> denseSecularRange(const SymbolCoefficients& q, int m, int n, double xi,
                                            double eta) {
  const int mu_max = q.degree() / std::max(std::abs(m), std::abs(n));
  std::vector<cplx> c;
  for (int mu = -mu_max; mu <= mu_max; ++mu)
    c.push_back(q.coeff(0, mu * m, mu * n) + q.coeff(1, mu * m, mu * n) * xi +
                q.coeff(2, mu * m, mu * n) * eta);
  const int samples = 1 << 20;
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * kPi * i / samples;
    cplx s = 0.0;
    for (int mu = -mu_max; mu <= mu_max; ++mu)
      s += c[std::size_t(mu + mu_max)] * std::exp(cplx{0.0, mu * t});
    lo = std::min(lo, s.real());
    hi = std::max(hi, s.real());
  }
  return {lo, hi};
}

}  // namespace

TEST(RationalDirections, SmallDegrees) {
  const auto d1 = rationalDirections(1);
  const std::vector<RationalDirection> e1 = {{0, 1}, {1, -1}, {1, 0}, {1, 1}};
  EXPECT_EQ(d1, e1);
  const auto d2 = rationalDirections(2);
  ASSERT_EQ(d2.size(), 8u);
  const std::vector<RationalDirection> e2 = {{0, 1}, {1, -2}, {1, -1}, {1, 0},
                                             {1, 1}, {1, 2},  {2, -1}, {2, 1}};
  EXPECT_EQ(d2, e2);
}

TEST(RationalDirections, MatchesBruteForce) {
  for (int f = 1; f <= 8; ++f) {
    const auto dirs = rationalDirections(f);
    const auto ref = bruteDirections(f);
    ASSERT_EQ(dirs.size(), ref.size()) << f;
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(dirs[i].m, ref[i].first);
      EXPECT_EQ(dirs[i].n, ref[i].second);
      const auto [ux, uy] = dirs[i].unitCotangent();
      EXPECT_NEAR(std::hypot(ux, uy), 1.0, 1e-15);
    }
  }
  EXPECT_THROW(rationalDirections(0), Error);
}

TEST(RationalDirection, CanonicalSignAndPrimitivity) {
  EXPECT_EQ(RationalDirection::make(-1, 2), (RationalDirection{1, -2}));
  EXPECT_EQ(RationalDirection::make(0, -1), (RationalDirection{0, 1}));
  EXPECT_THROW(RationalDirection::make(2, 4), Error);
  EXPECT_THROW(RationalDirection::make(0, 0), Error);
}

TEST(SecularAverage, CosineAlongFirstAxis) {
  for (double t : {0.0, 0.5, 2.0, 4.0})
    EXPECT_NEAR(secularAverage(cosX(), {1, 0}, 0.0, 1.0, t), std::cos(t), 1e-15);
}

TEST(SecularAverage, ConstantWhenDirectionTooHigh) {
  const auto q = generateRandomSymbol(2, 2.0, 3);
  const RationalDirection d = RationalDirection::make(3, 1);
  const double mean = q.combined(0, 0, 0.3, -0.2).real();
  for (double t : {0.0, 1.0, 5.0}) EXPECT_NEAR(secularAverage(q, d, 0.3, -0.2, t), mean, 1e-15);
}

TEST(SecularAverage, MatchesClosedOrbitQuadrature) {
  const auto q = generateRandomSymbol(2, 2.0, 11);
  const RationalDirection d{1, 1};
  const auto [ux, uy] = d.unitCotangent();
  for (int i = 0; i < 50; ++i) {
    const double t = 2.0 * kPi * (i + 0.37) / 50.0;
    EXPECT_NEAR(secularAverage(q, d, ux, uy, t), oracle::closedOrbitAverage(q, 1, 1, ux, uy, t),
                1e-10);
  }
}

TEST(SecularPolynomial, DerivativesMatchFiniteDifferences) {
  const auto q = generateRandomSymbol(4, 1.0, 2);
  const SecularPolynomial p(q, {1, 0}, 0.0, 1.0);
  ASSERT_EQ(p.order(), 4);
  const double h = 1e-4;
  for (double t : {0.3, 1.7, 4.4}) {
    const double fd1 = (p.value(t + h) - p.value(t - h)) / (2 * h);
    const double fd2 = (p.value(t + h) - 2 * p.value(t) + p.value(t - h)) / (h * h);
    EXPECT_NEAR(p.derivative(t), fd1, 1e-7);
    EXPECT_NEAR(p.secondDerivative(t), fd2, 1e-5);
  }
}

TEST(QInfinity, CosineExamples) {
  const auto a = qInfinityInterval(cosX(), {1, 0}, 1.0);
  EXPECT_NEAR(a.q_inf, -1.0, 1e-14);
  EXPECT_NEAR(a.q_sup, 1.0, 1e-14);
  EXPECT_NEAR(a.t_min, kPi, 1e-8);
  EXPECT_NEAR(a.second_derivative_at_min, 1.0, 1e-12);
  EXPECT_NEAR(a.torus_min_q, -1.0, 1e-6);
  EXPECT_NEAR(a.torus_max_q, 1.0, 1e-6);

  const auto b = qInfinityInterval(cosX(), {0, 1}, 1.0);
  EXPECT_EQ(b.q_inf, 0.0);
  EXPECT_EQ(b.q_sup, 0.0);
  EXPECT_EQ(b.torus_average, 0.0);
}

TEST(QInfinity, DegenerateMinimumIsFlagged) {
  // cos t + cos(2t)/4 has a quartic minimum at t = pi.
  const auto q = SymbolCoefficients(2, 1.0).withCoefficient(0, 1, 0, 0.5).withCoefficient(0, 2, 0, 0.125);
  try {
    qInfinityInterval(q, {1, 0}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateMinimum);
  }
  const auto lax = qInfinityInterval(q, {1, 0}, 1.0, false);
  EXPECT_NEAR(lax.q_inf, -0.75, 1e-12);
  EXPECT_THROW(qInfinityInterval(q, {1, 0}, -1.0), Error);
}

TEST(QInfinity, EndpointsMatchDenseSampling) {
  const auto q = generateRandomSymbol(2, 2.0, 5);
  for (const auto& d : rationalDirections(2)) {
    const auto iv = qInfinityInterval(q, d, 1.0, false);
    const auto [lo, hi] = denseSecularRange(q, d.m, d.n, iv.xi, iv.eta);
    EXPECT_NEAR(iv.q_inf, lo, 1e-8) << d.m << "," << d.n;
    EXPECT_NEAR(iv.q_sup, hi, 1e-8) << d.m << "," << d.n;
    EXPECT_NEAR(secularAverage(q, d, iv.xi, iv.eta, iv.t_min), iv.q_inf, 1e-14);
  }
}

TEST(QInfinity, OrderingInvariants) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto q = generateRandomSymbol(2, 2.0, seed);
    for (const auto& d : rationalDirections(2)) {
      const auto iv = qInfinityInterval(q, d, 0.9, false);
      EXPECT_LE(iv.q_inf, iv.torus_average + 1e-14);
      EXPECT_LE(iv.torus_average, iv.q_sup + 1e-14);
      EXPECT_LE(iv.torus_min_q, iv.q_inf + 1e-9);
      EXPECT_LE(iv.q_sup, iv.torus_max_q + 1e-9);
      EXPECT_NEAR(iv.torus_average, q.combined(0, 0, iv.xi, iv.eta).real(), 1e-15);
      EXPECT_GE(iv.second_derivative_at_min, 0.0);
    }
  }
}

TEST(TorusExtrema, MatchesFineGrid) {
  const auto q = generateRandomSymbol(2, 2.0, 9);
  const double xi = 0.6, eta = -0.8;
  const auto te = torusExtrema(q, xi, eta);
  double lo = 1e300, hi = -1e300;
  const int g = 1024;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double v = oracle::symbolValue(q, 2 * kPi * i / g, 2 * kPi * j / g, xi, eta);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  EXPECT_LE(te.min, lo + 1e-12);
  EXPECT_GE(te.max, hi - 1e-12);
  EXPECT_NEAR(te.min, lo, 1e-4);
  EXPECT_NEAR(te.max, hi, 1e-4);
}

TEST(FiniteTimeAverage, CosineExamples) {
  for (double T : {0.5, 3.0, 100.0}) {
    EXPECT_NEAR(finiteTimeAverage(cosX(), PhasePoint::make(0.7, 0.2, 0.0, 1.0), T), std::cos(0.7),
                1e-15);
    EXPECT_NEAR(finiteTimeAverage(cosX(), PhasePoint::make(0.0, 0.2, 1.0, 0.0), T),
                std::sin(T) / T, 1e-15);
  }
  EXPECT_EQ(khat(0.0), 1.0);
  EXPECT_THROW(finiteTimeAverage(cosX(), PhasePoint::make(0, 0, 1, 0), 0.0), Error);
}

TEST(FiniteTimeAverage, MatchesQuadrature) {
  const auto q = generateRandomSymbol(2, 2.0, 21);
  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int i = 0; i < 3; ++i) {
    const double x = u(g), y = u(g), phi = u(g);
    const double xi = 0.9 * std::cos(phi), eta = 0.9 * std::sin(phi);
    const double ref = oracle::trajectoryAverage(q, x, y, xi, eta, 1e3);
    EXPECT_NEAR(finiteTimeAverage(q, PhasePoint::make(x, y, xi, eta), 1e3), ref, 1e-9);
  }
}

TEST(FiniteTimeAverage, ConvergesAtRateOneOverT) {
  const auto q = generateRandomSymbol(2, 2.0, 4);
  const double xi = std::cos(1.0), eta = std::sin(1.0);
  // C = sum_{k != 0} |q^(k)| * 2 / |k . p'|.
  double c = 0.0;
  for (int j = -2; j <= 2; ++j)
    for (int k = -2; k <= 2; ++k) {
      if (j == 0 && k == 0) continue;
      c += std::abs(q.combined(j, k, xi, eta)) * 2.0 / std::abs(2 * xi * j + 2 * eta * k);
    }
  const double mean = q.combined(0, 0, xi, eta).real();
  for (double T : {1e2, 1e3, 1e4})
    for (double x : {0.0, 1.0, 2.5})
      EXPECT_LE(std::abs(finiteTimeAverage(q, PhasePoint::make(x, 0.4, xi, eta), T) - mean), c / T);
}

TEST(FiniteTimeAverage, BoundedByTorusExtrema) {
  const auto q = generateRandomSymbol(2, 2.0, 6);
  const double xi = 0.28, eta = 0.96;
  const auto te = torusExtrema(q, xi, eta);
  for (double T : {0.1, 1.0, 7.0, 50.0})
    for (double x : {0.0, 1.1, 3.9})
      for (double y : {0.2, 5.0}) {
        const double v = finiteTimeAverage(q, PhasePoint::make(x, y, xi, eta), T);
        EXPECT_GE(v, te.min - 1e-9);
        EXPECT_LE(v, te.max + 1e-9);
      }
}

TEST(BandBounds, CosineAndConstant) {
  const auto b = bandBounds(cosX(), 1.0, 64);
  EXPECT_NEAR(b.inf_band, -1.0, 1e-14);
  EXPECT_NEAR(b.sup_band, 1.0, 1e-14);
  const auto c = bandBounds(SymbolCoefficients(2, 1.0).withCoefficient(0, 0, 0, 0.4), 1.0, 64);
  EXPECT_EQ(c.inf_band, 0.4);
  EXPECT_EQ(c.sup_band, 0.4);
  EXPECT_THROW(bandBounds(cosX(), 1.0, 32), Error);
}

TEST(BandBounds, MatchesBruteForceRecomputation) {
  const auto q = generateRandomSymbol(2, 2.0, 8);
  const double energy = 0.9;
  const auto b = bandBounds(q, energy, 256);
  // Doubled sampling of the average curve plus dense sampling of every
  // direction's secular polynomial, both orientations.
  const double r = std::sqrt(energy);
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 512; ++i) {
    const double phi = 2 * kPi * (i + 0.25) / 512;
    const double v = q.combined(0, 0, r * std::cos(phi), r * std::sin(phi)).real();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (const auto& [m, n] : bruteDirections(2))
    for (double s : {1.0, -1.0}) {
      const double len = std::hypot(m, n);
      const auto [a, z] = denseSecularRange(q, m, n, -s * r * n / len, s * r * m / len);
      lo = std::min(lo, a);
      hi = std::max(hi, z);
    }
  const double width = hi - lo;
  EXPECT_NEAR(b.inf_band, lo, 1e-3 * width);
  EXPECT_NEAR(b.sup_band, hi, 1e-3 * width);
  EXPECT_LE(b.average_min, b.average_max);
  EXPECT_LE(b.inf_band, b.average_min);
  EXPECT_GE(b.sup_band, b.average_max);
}

TEST(Cohomological, SineExample) {
  FourierSeries2D v;
  v.coeffs[{0, 1}] = cplx{0.0, -0.5};
  v.coeffs[{0, -1}] = cplx{0.0, 0.5};
  const auto s = cohomologicalSolve(v);
  EXPECT_TRUE(s.mean2.coeffs.empty());
  for (double x2 : {0.0, 0.4, 2.0, 5.5}) {
    EXPECT_NEAR(s.u0_anchored.evaluate(0.3, x2).real(), 1.0 - std::cos(x2), 1e-15);
    EXPECT_NEAR(s.u0.evaluate(0.3, x2).real(), -std::cos(x2), 1e-15);
  }
  EXPECT_EQ(s.u0.coeff(0, 0), cplx{});
}

TEST(Cohomological, IndependentOfSecondVariable) {
  FourierSeries2D v;
  v.coeffs[{1, 0}] = cplx{0.2, 0.1};
  v.coeffs[{-1, 0}] = cplx{0.2, -0.1};
  v.coeffs[{0, 0}] = 3.0;
  const auto s = cohomologicalSolve(v);
  EXPECT_TRUE(s.u0.coeffs.empty());
  EXPECT_EQ(s.mean2.coeffs, v.coeffs);
}

TEST(Cohomological, DefiningEquationHoldsCoefficientwise) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> d;
  FourierSeries2D v;
  for (int j = -3; j <= 3; ++j)
    for (int k = -3; k <= 3; ++k) v.coeffs[{j, k}] = cplx{d(g), d(g)};
  const auto s = cohomologicalSolve(v);
  for (int j = -3; j <= 3; ++j)
    for (int k = -3; k <= 3; ++k) {
      const cplx lhs = cplx{0.0, double(k)} * s.u0.coeff(j, k);
      const cplx rhs = v.coeff(j, k) - s.mean2.coeff(j, k);
      EXPECT_LE(std::abs(lhs - rhs), 1e-14);
      const cplx lhs_a = cplx{0.0, double(k)} * s.u0_anchored.coeff(j, k);
      EXPECT_LE(std::abs(lhs_a - rhs), 1e-14);
    }
  // The anchored solution vanishes on x2 = 0.
  for (double x1 : {0.0, 1.3, 4.1}) EXPECT_LE(std::abs(s.u0_anchored.evaluate(x1, 0.0)), 1e-13);
}

TEST(BandBoundsOverRange, UnionOfCircles) {
  const auto q = generateRandomSymbol(2, 2.0, 5);
  const auto single = bandBoundsOverRange(q, 0.95, 0.95, 1, 256);
  const auto at = bandBounds(q, 0.95, 256);
  EXPECT_EQ(single.inf_band, at.inf_band);
  EXPECT_EQ(single.sup_band, at.sup_band);
  const auto range = bandBoundsOverRange(q, 0.9, 1.1, 5, 256);
  for (double e : {0.9, 0.95, 1.0, 1.05, 1.1}) {
    const auto b = bandBounds(q, e, 256);
    EXPECT_LE(range.inf_band, b.inf_band);
    EXPECT_GE(range.sup_band, b.sup_band);
  }
  EXPECT_THROW(bandBoundsOverRange(q, 1.1, 0.9, 3, 256), Error);
  EXPECT_THROW(bandBoundsOverRange(q, 0.9, 1.1, 0, 256), Error);
}
