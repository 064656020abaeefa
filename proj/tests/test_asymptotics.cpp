#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "torspec/asymptotics.hpp"
#include "torspec/error.hpp"
#include "torspec/model1d.hpp"

using namespace torspec;

namespace {

const cplx kRot = std::polar(1.0, std::numbers::pi / 4);

SymbolCoefficients cosineX() {
  return SymbolCoefficients(1, 1.0).withCoefficient(0, 1, 0, 0.5);
}

SymbolCoefficients legModel() {
  return cosineX().withCoefficient(0, 0, 1, 0.1);
}

ErrorKind kindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind{};
}

SpectrumRecord syntheticSpectrum(double eps, std::vector<cplx> z) {
  SpectrumRecord s;
  s.h = 0.05;
  s.epsilon = eps;
  s.eigenvalues = std::move(z);
  return s;
}

}  // namespace

TEST(HarmonicLadder, FormulaAndGaps) {
  const auto l = harmonicLadder(2.0, 2.0, 4);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_NEAR(std::abs(l[0] - kRot), 0.0, 1e-15);
  EXPECT_NEAR(l[0].real(), 0.70711, 1e-5);
  for (std::size_t k = 1; k < l.size(); ++k)
    EXPECT_NEAR(std::abs(l[k] - l[k - 1] - 2.0 * kRot), 0.0, 1e-14);
  EXPECT_EQ(kindOf([] { harmonicLadder(0.0, 2.0, 1); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kindOf([] { harmonicLadder(1.0, -1.0, 1); }), ErrorKind::InvalidArgument);
}

TEST(HarmonicLadder, MatchesOneDimensionalTruncation) {
  // (hD)^2 + i(1 - cos x): p'' = 2, V'' = 1 at the minimum.
  const double h = 0.01;
  Model1D m;
  m.h = h;
  m.epsilon = 1.0;
  m.potential = oneMinusCosine();
  const auto z = lowLyingSpectrum(m, 4);
  const auto l = harmonicLadder(1.0, 2.0, 3);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_LE(std::abs(z[k] - h * l[k]), 5 * h * h) << k;
}

TEST(PredictLattice, CosineDirectionClosedForm) {
  const double h = 0.05, eps = 0.1;
  const auto p = predictLattice(cosineX(), RationalDirection::make(1, 0), 1.0, h, eps, 0, 0);
  EXPECT_NEAR(p.q_inf, -1.0, 1e-12);
  EXPECT_NEAR(p.t_min, std::numbers::pi, 1e-9);
  EXPECT_NEAR(p.second_derivative_b, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(p.curvature_p, 2.0);
  EXPECT_DOUBLE_EQ(p.calibration_factor, 1.0);
  ASSERT_EQ(p.predictions.size(), 1u);
  const LatticePoint& lp = p.predictions[0];
  EXPECT_EQ(lp.j, 20);
  EXPECT_NEAR(lp.xi2, 1.0, 1e-15);
  const cplx lambda0 = kRot * std::sqrt(2.0) * 0.5;
  EXPECT_NEAR(std::abs(lp.value - (1.0 - cplx{0.0, eps} + std::sqrt(eps) * h * lambda0)), 0.0,
              1e-12);
}

TEST(PredictLattice, LadderOrderingAndArgument) {
  const double h = 0.05, eps = 0.1;
  const auto p = predictLattice(legModel(), RationalDirection::make(1, 0), 0.9, h, eps, 2, 2);
  ASSERT_EQ(p.predictions.size(), 15u);
  ASSERT_EQ(p.xi2_values.size(), 5u);
  const double s = std::sqrt(eps) * h;
  for (std::size_t i = 0; i < p.predictions.size(); ++i) {
    const LatticePoint& lp = p.predictions[i];
    const cplx offset = lp.value - lp.xi2 * lp.xi2 - cplx{0.0, eps * p.q_inf};
    EXPECT_NEAR(std::arg(offset), std::numbers::pi / 4, 1e-12);
    if (lp.k > 0) {
      const cplx gap = lp.value - p.predictions[i - 1].value;
      EXPECT_GT(gap.imag(), 0.0);
      EXPECT_NEAR(std::abs(gap - p.ladder_prefactor), 0.0, 1e-12 * s);
    }
  }
  for (std::size_t i = 1; i < p.xi2_values.size(); ++i)
    EXPECT_NEAR(p.xi2_values[i] - p.xi2_values[i - 1], h, 1e-12);
}

TEST(PredictLattice, DiagonalDirectionSpacingAndCalibration) {
  const SymbolCoefficients q = SymbolCoefficients(1, 1.0).withCoefficient(0, 1, 1, 0.5);
  const auto p = predictLattice(q, RationalDirection::make(1, 1), 1.0, 0.05, 0.1, 1, 0);
  EXPECT_NEAR(p.calibration_factor, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(p.curvature_p, 4.0, 1e-14);
  EXPECT_NEAR(p.xi2_values[1] - p.xi2_values[0], 0.05 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(p.q_inf, -1.0, 1e-12);
}

TEST(PredictLattice, PrefactorScalesExactly) {
  const auto a = predictLattice(legModel(), RationalDirection::make(1, 0), 0.9, 0.05, 0.1, 0, 1);
  const auto b = predictLattice(legModel(), RationalDirection::make(1, 0), 0.9, 0.025, 0.05, 0, 1);
  EXPECT_NEAR(std::abs(b.ladder_prefactor / a.ladder_prefactor), std::pow(0.5, 1.5), 1e-12);
  EXPECT_NEAR(std::arg(b.ladder_prefactor / a.ladder_prefactor), 0.0, 1e-12);
}

TEST(PredictLattice, WindowIsAdvisory) {
  const auto in = predictLattice(cosineX(), RationalDirection::make(1, 0), 1.0, 0.01, 0.01, 0, 0);
  EXPECT_TRUE(in.in_window);
  EXPECT_TRUE(in.window_note.empty());
  const auto out = predictLattice(cosineX(), RationalDirection::make(1, 0), 1.0, 0.025, 0.05, 0, 0);
  EXPECT_FALSE(out.in_window);
  EXPECT_FALSE(out.window_note.empty());
}

TEST(PredictLattice, Errors) {
  const SymbolCoefficients flat(1, 1.0);
  EXPECT_EQ(kindOf([&] { predictLattice(flat, RationalDirection::make(1, 0), 1.0, 0.05, 0.1, 0, 0); }),
            ErrorKind::DegenerateMinimum);
  const SymbolCoefficients twin = SymbolCoefficients(2, 1.0).withCoefficient(0, 2, 0, 0.5);
  EXPECT_EQ(kindOf([&] { predictLattice(twin, RationalDirection::make(1, 0), 1.0, 0.05, 0.1, 0, 0); }),
            ErrorKind::DegenerateMinimum);
  EXPECT_EQ(kindOf([] { predictLattice(cosineX(), RationalDirection::make(1, 0), 1.0, 0.0, 0.1, 0, 0); }),
            ErrorKind::InvalidArgument);
  EXPECT_EQ(kindOf([] { predictLattice(cosineX(), RationalDirection::make(1, 0), 1.0, 0.05, 0.1, -1, 0); }),
            ErrorKind::InvalidArgument);
}

TEST(ExtractLeg, EmptyInsideBand) {
  const auto s = syntheticSpectrum(0.1, {{1.0, 0.01}, {0.9, -0.05}, {0.95, 0.0}});
  EXPECT_TRUE(extractLeg(s, -1.0, 1.0, LegSide::Below, 0.1).empty());
  EXPECT_TRUE(extractLeg(s, -1.0, 1.0, LegSide::Above, 0.1).empty());
}

TEST(ExtractLeg, PlantedOutliersInOrder) {
  const auto s = syntheticSpectrum(
      0.1, {{1.0, 0.01}, {0.9, -0.25}, {0.95, 0.0}, {0.91, -0.3}, {0.97, 0.05}, {0.92, -0.21}});
  const auto leg = extractLeg(s, -1.0, 1.0, LegSide::Below, 0.05);
  ASSERT_EQ(leg.size(), 3u);
  EXPECT_EQ(leg[0], cplx(0.91, -0.3));
  EXPECT_EQ(leg[1], cplx(0.9, -0.25));
  EXPECT_EQ(leg[2], cplx(0.92, -0.21));
  EXPECT_EQ(kindOf([&] { extractLeg(syntheticSpectrum(0.0, {}), 0, 1, LegSide::Below, 0); }),
            ErrorKind::InvalidArgument);
}

TEST(ExtractLeg, LegIsSparseAgainstBody) {
  const double h = 0.05, eps = 2 * h;
  const auto rec = computeSpectrum(assembleMatrix(legModel(), buildModeShell(h, 0.75, 1.0), eps), {});
  const auto legs = extractLeg(rec, -0.2, 0.2, LegSide::Below, 0.05);
  EXPECT_GT(legs.size(), 0u);
  EXPECT_LT(3 * legs.size(), rec.eigenvalues.size());
}

TEST(MatchSpectra, IdentityShiftAndMissingPoint) {
  const double h = 0.05, eps = 0.1, s = std::sqrt(eps) * h;
  const auto p = predictLattice(legModel(), RationalDirection::make(1, 0), 0.9, h, eps, 3, 3);
  const auto pv = p.values();

  const MatchReport self = matchSpectra(p, pv);
  EXPECT_EQ(self.pairs.size(), pv.size());
  EXPECT_EQ(self.unmatched_predicted, 0u);
  EXPECT_EQ(self.rms_rescaled_error, 0.0);
  for (const auto& pr : self.pairs) EXPECT_EQ(pr.distance, 0.0);

  std::vector<cplx> shifted;
  for (const cplx& z : pv) shifted.push_back(z + 0.1 * s * cplx{1.0, 1.0});
  const MatchReport sh = matchSpectra(p, shifted);
  EXPECT_EQ(sh.pairs.size(), pv.size());
  for (const auto& pr : sh.pairs) EXPECT_NEAR(pr.distance, 0.2, 1e-9);
  EXPECT_NEAR(sh.rms_rescaled_error, 0.2, 1e-9);

  std::vector<cplx> missing = pv;
  missing.erase(missing.begin() + 5);
  const MatchReport mi = matchSpectra(p, missing);
  EXPECT_EQ(mi.unmatched_predicted, 1u);
  EXPECT_EQ(mi.unmatched_computed, 0u);
}

TEST(MatchSpectra, InjectiveAndCapped) {
  const double h = 0.1, eps = 1.0;
  const std::vector<cplx> pred{{0.0, 0.0}, {0.01, 0.0}};
  const std::vector<cplx> comp{{0.005, 0.0}, {5.0, 5.0}};
  const MatchReport r = matchSpectra(pred, comp, h, eps);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.unmatched_predicted, 1u);
  EXPECT_EQ(r.unmatched_computed, 1u);
  EXPECT_NEAR(r.pairs[0].distance, 0.05, 1e-12);
  EXPECT_EQ(kindOf([&] { matchSpectra(std::vector<cplx>{}, comp, h, eps); }),
            ErrorKind::InvalidArgument);
}

TEST(MatchSpectra, ReportRoundTrip) {
  const auto p = predictLattice(legModel(), RationalDirection::make(1, 0), 0.9, 0.05, 0.1, 1, 2);
  std::vector<cplx> comp = p.values();
  for (auto& z : comp) z += cplx{1e-4, -2e-4};
  const MatchReport r = matchSpectra(p, comp);
  std::stringstream ss;
  writeMatchReport(ss, r, 0.05, 0.1);
  const MatchReport back = readMatchReport(ss);
  ASSERT_EQ(back.pairs.size(), r.pairs.size());
  EXPECT_EQ(back.rms_rescaled_error, r.rms_rescaled_error);
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    EXPECT_EQ(back.pairs[i].predicted, r.pairs[i].predicted);
    EXPECT_EQ(back.pairs[i].computed, r.pairs[i].computed);
    EXPECT_EQ(back.pairs[i].distance, r.pairs[i].distance);
  }
  std::stringstream ps;
  writePrediction(ps, p);
  EXPECT_NE(ps.str().find("calibration_factor"), std::string::npos);
}

TEST(PredictLattice, LadderAgainstTwoDimensionalSpectrum) {
  const double h = 0.025, eps = 2 * h, s = std::sqrt(eps) * h;
  const auto rec = computeSpectrum(assembleMatrix(legModel(), buildModeShell(h, 0.75, 1.0), eps), {});
  const int k = static_cast<int>(std::ceil(std::sqrt(0.75) / h));
  const auto p = predictLattice(legModel(), RationalDirection::make(1, 0), h * h * k * k, h, eps, 0, 3);
  const MatchReport r = matchSpectra(p, extractLeg(rec, -0.2, 0.2, LegSide::Below, 0.05));
  EXPECT_EQ(r.unmatched_predicted, 0u);
  EXPECT_LT(r.rms_rescaled_error, 0.5);
  for (const auto& pr : r.pairs) EXPECT_LT(std::abs(pr.computed.imag() - pr.predicted.imag()), 0.2 * s);
}

TEST(PredictLattice, RandomSymbolLowestTip) {
  const double h = 0.05, eps = 2 * h, s = std::sqrt(eps) * h;
  const SymbolCoefficients q = generateRandomSymbol(2, 2.0, 1);
  const double e1 = std::pow(std::sqrt(0.9) - 6 * h, 2), e2 = std::pow(std::sqrt(1.1) + 6 * h, 2);
  const auto rec = computeSpectrum(assembleMatrix(q, buildModeShell(h, e1, e2), eps), {});
  cplx tip{0.0, 1e300};
  for (const cplx& z : rec.eigenvalues)
    if (z.real() >= 0.9 && z.real() <= 1.1 && z.imag() < tip.imag()) tip = z;
  double best = 1e300;
  QInfinityInterval lowest;
  for (const auto& d : rationalDirections(2)) {
    const auto [ux, uy] = d.unitCotangent();
    for (double sign : {1.0, -1.0}) {
      const double r = sign * std::sqrt(tip.real());
      const auto iv = qInfinityIntervalAt(q, d, r * ux, r * uy, false);
      if (iv.q_inf < best) {
        best = iv.q_inf;
        lowest = iv;
      }
    }
  }
  const double len = lowest.direction.length();
  const cplx lambda0 = harmonicLadder(lowest.second_derivative_at_min, 2 * len * len, 0)[0];
  const double predicted_im = eps * lowest.q_inf + s * lambda0.imag();
  EXPECT_LT(std::abs(tip.imag() - predicted_im), 0.5 * s);
}

TEST(PredictLattice, OppositeOrientation) {
  // q = cos x + 0.3 eta: the two tori of direction (1,0) differ by the sign of eta.
  const auto q = cosineX().withCoefficient(2, 0, 0, 0.3);
  const double h = 0.05, eps = 0.05;
  const auto pos = predictLattice(q, RationalDirection::make(1, 0), 1.0, h, eps, 1, 1, 1);
  const auto neg = predictLattice(q, RationalDirection::make(1, 0), 1.0, h, eps, 1, 1, -1);
  ASSERT_EQ(pos.xi2_values.size(), neg.xi2_values.size());
  const std::size_t n = pos.xi2_values.size();
  for (std::size_t i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(neg.xi2_values[i], -pos.xi2_values[n - 1 - i]);
  EXPECT_EQ(neg.orientation, -1);
  EXPECT_NEAR(pos.q_inf - neg.q_inf, 0.6, 1e-9);
  EXPECT_NEAR(pos.q_inf, -0.7, 1e-9);
}

TEST(PredictLattice, FileRoundTrip) {
  const auto p = predictLattice(legModel(), RationalDirection::make(1, 0), 0.9, 0.05, 0.1, 2, 3, -1);
  std::ostringstream out;
  writePrediction(out, p);
  std::istringstream in(out.str());
  const LatticePrediction r = readPrediction(in);
  EXPECT_EQ(r.direction.m, 1);
  EXPECT_EQ(r.direction.n, 0);
  EXPECT_EQ(r.orientation, -1);
  EXPECT_EQ(r.h, p.h);
  EXPECT_EQ(r.epsilon, p.epsilon);
  EXPECT_EQ(r.q_inf, p.q_inf);
  EXPECT_EQ(r.ladder_prefactor, p.ladder_prefactor);
  EXPECT_EQ(r.in_window, p.in_window);
  EXPECT_EQ(r.xi2_values, p.xi2_values);
  EXPECT_EQ(r.values(), p.values());
  std::ostringstream again;
  writePrediction(again, r);
  EXPECT_EQ(again.str(), out.str());
}
