#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "torspec/error.hpp"
#include "torspec/symbol.hpp"

using namespace torspec;

namespace {

// Regenerates the documented draw sequence: mt19937_64, 53-bit midpoint
// uniforms, Box-Muller emitting cos then sin.
std::vector<double> referenceNormals(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 eng(seed);
  std::vector<double> out;
  while (out.size() < count) {
    const double u1 = (double(eng() >> 11) + 0.5) / 9007199254740992.0;
    const double u2 = (double(eng() >> 11) + 0.5) / 9007199254740992.0;
    const double r = std::sqrt(-2.0 * std::log(u1));
    out.push_back(r * std::cos(2.0 * std::numbers::pi * u2));
    out.push_back(r * std::sin(2.0 * std::numbers::pi * u2));
  }
  out.resize(count);
  return out;
}

double directSum(const SymbolCoefficients& q, double x, double y, double xi, double eta) {
  cplx s = 0.0;
  const int f = q.degree();
  for (int j = -f; j <= f; ++j)
    for (int k = -f; k <= f; ++k) {
      const cplx c = q.coeff(0, j, k) + q.coeff(1, j, k) * xi + q.coeff(2, j, k) * eta;
      s += c * std::exp(cplx{0.0, j * x + k * y});
    }
  return s.real();
}

SymbolCoefficients cosX() {
  return SymbolCoefficients(1, 1.0).withCoefficient(0, 1, 0, 0.5);
}

}  // namespace

TEST(GenerateRandomSymbol, DegreeZeroIsConstant) {
  const auto q = generateRandomSymbol(0, 2.0, 7);
  EXPECT_EQ(q.degree(), 0);
  for (int ell = 0; ell < 3; ++ell) EXPECT_EQ(q.coeff(ell, 0, 0).imag(), 0.0);
  const double a = evaluateSymbol(q, PhasePoint::make(0.1, 0.2, 0.3, 0.4));
  const double b = evaluateSymbol(q, PhasePoint::make(2.5, 4.0, 0.3, 0.4));
  EXPECT_EQ(a, b);
}

TEST(GenerateRandomSymbol, HermitianAndFullyPopulated) {
  const auto q = generateRandomSymbol(2, 2.0, 1);
  EXPECT_EQ(q.hermitianDefect(), 0.0);
  for (int ell = 0; ell < 3; ++ell) {
    int populated = 0;
    for (int j = -2; j <= 2; ++j)
      for (int k = -2; k <= 2; ++k) {
        EXPECT_EQ(q.coeff(ell, -j, -k), std::conj(q.coeff(ell, j, k)));
        if (q.coeff(ell, j, k) != cplx{}) ++populated;
      }
    EXPECT_EQ(populated, 25);
  }
  EXPECT_EQ(q.coeff(0, 3, 0), cplx{});
}

TEST(GenerateRandomSymbol, MatchesIndependentRegeneration) {
  const int f = 2;
  const double kappa = 1.5;
  const auto q = generateRandomSymbol(f, kappa, 99);
  const auto alpha = referenceNormals(99, 3 * 25);
  auto a = [&](int ell, int j, int k) {
    return std::exp(-kappa * std::abs(j - k)) * alpha[std::size_t(ell * 25 + (j + f) * 5 + (k + f))];
  };
  for (int ell = 0; ell < 3; ++ell)
    for (int j = -f; j <= f; ++j)
      for (int k = -f; k <= f; ++k) {
        const double ref = 0.5 * (a(ell, j, k) + a(ell, -j, -k));
        EXPECT_NEAR(q.coeff(ell, j, k).real(), ref, 1e-15 * std::max(1.0, std::abs(ref)));
        EXPECT_EQ(q.coeff(ell, j, k).imag(), 0.0);
      }
}

TEST(GenerateRandomSymbol, DecayFactor) {
  const auto q = generateRandomSymbol(2, 10.0, 1);
  const auto alpha = referenceNormals(1, 75);
  double amax = 0.0;
  for (double v : alpha) amax = std::max(amax, std::abs(v));
  for (int ell = 0; ell < 3; ++ell) {
    EXPECT_LE(std::abs(q.coeff(ell, 2, -2)), std::exp(-40.0) * amax);
    EXPECT_LE(std::abs(q.coeff(ell, -2, 2)), std::exp(-40.0) * amax);
  }
}

TEST(GenerateRandomSymbol, PureFunctionOfInputs) {
  EXPECT_EQ(generateRandomSymbol(3, 2.0, 5), generateRandomSymbol(3, 2.0, 5));
  EXPECT_FALSE(generateRandomSymbol(3, 2.0, 5) == generateRandomSymbol(3, 2.0, 6));
}

TEST(GenerateRandomSymbol, RejectsBadArguments) {
  EXPECT_THROW(generateRandomSymbol(kMaxSymbolDegree + 1, 2.0, 1), Error);
  EXPECT_THROW(generateRandomSymbol(-1, 2.0, 1), Error);
  EXPECT_THROW(generateRandomSymbol(2, 0.0, 1), Error);
}

TEST(EvaluateSymbol, CosineExamples) {
  EXPECT_NEAR(evaluateSymbol(cosX(), PhasePoint::make(0.0, 1.3, 0.2, 0.9)), 1.0, 1e-15);
  EXPECT_NEAR(evaluateSymbol(cosX(), PhasePoint::make(std::numbers::pi, 0.4, 0.0, 0.0)), -1.0,
              1e-15);
}

TEST(EvaluateSymbol, AgreesWithDirectSumAndIsReal) {
  const auto q = generateRandomSymbol(2, 2.0, 123);
  std::mt19937_64 g(8);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> mom(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double x = ang(g), y = ang(g), xi = mom(g), eta = mom(g);
    const auto p = PhasePoint::make(x, y, xi, eta);
    const double ref = directSum(q, x, y, xi, eta);
    EXPECT_NEAR(evaluateSymbol(q, p), ref, 1e-12 * std::max(1.0, std::abs(ref)));
    EXPECT_LE(std::abs(evaluateSymbolRaw(q, p).imag()), 1e-12 * q.l1Norm());
  }
}

TEST(PhasePoint, AnglesReduced) {
  const auto p = PhasePoint::make(-0.5, 7.0, 1.0, 2.0);
  EXPECT_NEAR(p.x, 2.0 * std::numbers::pi - 0.5, 1e-15);
  EXPECT_NEAR(p.y, 7.0 - 2.0 * std::numbers::pi, 1e-15);
  EXPECT_GE(p.x, 0.0);
  EXPECT_LT(p.y, 2.0 * std::numbers::pi);
}

TEST(WithCoefficient, SetsConjugatePartner) {
  const auto q = SymbolCoefficients(2, 1.0).withCoefficient(1, 1, -2, cplx{0.3, -0.7});
  EXPECT_EQ(q.coeff(1, -1, 2), cplx(0.3, 0.7));
  EXPECT_EQ(q.hermitianDefect(), 0.0);
  EXPECT_THROW(q.withCoefficient(0, 0, 0, cplx{1.0, 1.0}), Error);
  EXPECT_THROW(q.withCoefficient(0, 3, 0, 1.0), Error);
  EXPECT_THROW(q.withCoefficient(3, 0, 0, 1.0), Error);
}

TEST(SymbolFile, RoundTripIsBitExact) {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const auto q = generateRandomSymbol(3, 0.7, seed);
    std::stringstream ss;
    writeSymbol(ss, q);
    EXPECT_EQ(readSymbol(ss), q);
  }
  const auto hand = cosX();
  std::stringstream ss;
  writeSymbol(ss, hand);
  const auto back = readSymbol(ss);
  EXPECT_EQ(back, hand);
  EXPECT_FALSE(back.seed().has_value());
}

TEST(SymbolFile, MalformedInputsRaiseIoError) {
  std::stringstream good;
  writeSymbol(good, generateRandomSymbol(1, 2.0, 4));
  const std::string text = good.str();

  auto expectIo = [](const std::string& s) {
    std::istringstream in(s);
    try {
      readSymbol(in);
      ADD_FAILURE() << "accepted: " << s.substr(0, 60);
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
  };
  // Drop the last coefficient line.
  expectIo(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  // Break Hermitian symmetry.
  std::string broken = text;
  const auto pos = broken.find("\n0 1 1 ");
  ASSERT_NE(pos, std::string::npos);
  broken.insert(pos + 7, "1");
  expectIo(broken);
  expectIo("F 1\nkappa 2\n");
  expectIo("F 1\nbogus 3\n");
}
