#include "torspec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "torspec/error.hpp"
#include "torspec/report_io.hpp"

namespace torspec {

namespace {

const cplx kEighthTurn = std::polar(1.0, std::numbers::pi / 4);

}  // namespace

std::vector<cplx> harmonicLadder(double second_derivative_b, double curvature_p, int k_max) {
  if (!(second_derivative_b > 0.0) || !(curvature_p > 0.0))
    fail(ErrorKind::InvalidArgument, "harmonic ladder needs positive curvatures");
  if (k_max < 0) fail(ErrorKind::InvalidArgument, "k_max must be nonnegative");
  const double root = std::sqrt(curvature_p * second_derivative_b);
  std::vector<cplx> out;
  for (int k = 0; k <= k_max; ++k) out.push_back(kEighthTurn * root * (k + 0.5));
  return out;
}

std::vector<cplx> LatticePrediction::values() const {
  std::vector<cplx> v;
  v.reserve(predictions.size());
  for (const auto& p : predictions) v.push_back(p.value);
  return v;
}

LatticePrediction predictLattice(const SymbolCoefficients& q, const RationalDirection& dir,
                                 double energy, double h, double epsilon, int j_range, int k_max,
                                 int orientation) {
  if (!(energy > 0.0) || !(h > 0.0) || !(epsilon > 0.0))
    fail(ErrorKind::InvalidArgument, "predictLattice needs positive energy, h and epsilon");
  if (j_range < 0 || k_max < 0)
    fail(ErrorKind::InvalidArgument, "predictLattice needs nonnegative j_range and k_max");
  if (orientation != 1 && orientation != -1)
    fail(ErrorKind::InvalidArgument, "orientation must be +1 or -1");
  const auto [ux, uy] = dir.unitCotangent();
  const double r = orientation * std::sqrt(energy);
  const QInfinityInterval centre = qInfinityIntervalAt(q, dir, r * ux, r * uy);
  if (centre.repeated_minimum || !(centre.second_derivative_at_min > 1e-9))
    fail(ErrorKind::DegenerateMinimum, "secular average has no unique nondegenerate minimum");

  LatticePrediction out;
  out.direction = dir;
  out.orientation = orientation;
  out.energy = energy;
  out.h = h;
  out.epsilon = epsilon;
  out.calibration_factor = dir.length();
  out.curvature_p = 2.0 * dir.length() * dir.length();
  out.q_inf = centre.q_inf;
  out.t_min = centre.t_min;
  out.second_derivative_b = centre.second_derivative_at_min;
  const double lo = std::pow(h, 9.0 / 8.0);
  const double hi = std::pow(h, 18.0 / 19.0);
  out.in_window = epsilon >= lo && epsilon <= hi;
  if (!out.in_window)
    out.window_note = "epsilon = " + fmt17(epsilon) + " outside the advisory window [" + fmt17(lo) +
                      ", " + fmt17(hi) + "]";

  const double spacing = h / dir.length();
  const int s0 = orientation * static_cast<int>(std::lround(std::sqrt(energy) / spacing));
  const double scale = std::sqrt(epsilon) * h;
  for (int s = s0 - j_range; s <= s0 + j_range; ++s) {
    const double xi2 = spacing * s;
    out.xi2_values.push_back(xi2);
    const QInfinityInterval iv = qInfinityIntervalAt(q, dir, xi2 * ux, xi2 * uy);
    if (iv.repeated_minimum || !(iv.second_derivative_at_min > 1e-9))
      fail(ErrorKind::DegenerateMinimum,
           "secular average degenerates at xi2 = " + fmt17(xi2));
    const auto ladder = harmonicLadder(iv.second_derivative_at_min, out.curvature_p, k_max);
    for (int k = 0; k <= k_max; ++k) {
      const cplx z = xi2 * xi2 + cplx{0.0, epsilon * iv.q_inf} + scale * ladder[std::size_t(k)];
      out.predictions.push_back({s, k, xi2, z});
    }
    if (s == s0) {
      const auto l2 = harmonicLadder(iv.second_derivative_at_min, out.curvature_p, 1);
      out.ladder_prefactor = scale * (l2[1] - l2[0]);
    }
  }
  return out;
}

std::vector<cplx> extractLeg(const SpectrumRecord& spectrum, double inf_band, double sup_band,
                             LegSide side, double margin) {
  if (!(spectrum.epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "extractLeg needs epsilon > 0");
  std::vector<cplx> out;
  for (const cplx& z : spectrum.eigenvalues) {
    const double r = z.imag() / spectrum.epsilon;
    if (side == LegSide::Below ? r < inf_band - margin : r > sup_band + margin) out.push_back(z);
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.imag() != b.imag()) return a.imag() < b.imag();
    return a.real() < b.real();
  });
  return out;
}

double rescaledDistance(cplx z, cplx w, double h, double epsilon) {
  const double s = std::sqrt(epsilon) * h;
  return (std::abs(z.real() - w.real()) + std::abs(z.imag() - w.imag())) / s;
}

MatchReport matchSpectra(const std::vector<cplx>& predicted, const std::vector<cplx>& computed,
                         double h, double epsilon) {
  if (predicted.empty() || computed.empty())
    fail(ErrorKind::InvalidArgument, "matchSpectra needs nonempty inputs");
  if (!(h > 0.0) || !(epsilon > 0.0))
    fail(ErrorKind::InvalidArgument, "matchSpectra needs positive h and epsilon");
  struct Candidate {
    double d;
    std::size_t p, c;
  };
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < predicted.size(); ++i)
    for (std::size_t j = 0; j < computed.size(); ++j) {
      const double d = rescaledDistance(predicted[i], computed[j], h, epsilon);
      if (d <= 2.0) cands.push_back({d, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.p != b.p) return a.p < b.p;
    return a.c < b.c;
  });
  std::vector<bool> used_p(predicted.size(), false), used_c(computed.size(), false);
  MatchReport r;
  double ss = 0.0;
  for (const auto& c : cands) {
    if (used_p[c.p] || used_c[c.c]) continue;
    used_p[c.p] = used_c[c.c] = true;
    r.pairs.push_back({predicted[c.p], computed[c.c], c.d});
    ss += c.d * c.d;
  }
  std::sort(r.pairs.begin(), r.pairs.end(), [](const MatchPair& a, const MatchPair& b) {
    if (a.predicted.real() != b.predicted.real()) return a.predicted.real() < b.predicted.real();
    return a.predicted.imag() < b.predicted.imag();
  });
  r.unmatched_predicted = predicted.size() - r.pairs.size();
  r.unmatched_computed = computed.size() - r.pairs.size();
  r.rms_rescaled_error = r.pairs.empty() ? 0.0 : std::sqrt(ss / double(r.pairs.size()));
  return r;
}

MatchReport matchSpectra(const LatticePrediction& predicted, const std::vector<cplx>& computed) {
  return matchSpectra(predicted.values(), computed, predicted.h, predicted.epsilon);
}

void writePrediction(std::ostream& out, const LatticePrediction& p) {
  out << "# torspec lattice prediction v1\n";
  writeHeader(out, "m", std::to_string(p.direction.m));
  writeHeader(out, "n", std::to_string(p.direction.n));
  writeHeader(out, "orientation", std::to_string(p.orientation));
  writeHeader(out, "energy", p.energy);
  writeHeader(out, "h", p.h);
  writeHeader(out, "epsilon", p.epsilon);
  writeHeader(out, "q_inf", p.q_inf);
  writeHeader(out, "t_min", p.t_min);
  writeHeader(out, "second_derivative_b", p.second_derivative_b);
  writeHeader(out, "curvature_p", p.curvature_p);
  writeHeader(out, "calibration_factor", p.calibration_factor);
  writeHeader(out, "ladder_prefactor_re", p.ladder_prefactor.real());
  writeHeader(out, "ladder_prefactor_im", p.ladder_prefactor.imag());
  writeHeader(out, "in_window", p.in_window ? "true" : "false");
  if (!p.window_note.empty()) writeHeader(out, "window_note", p.window_note);
  writeColumns(out, {"j", "k", "xi2", "re", "im", "im_over_eps"});
  for (const auto& l : p.predictions)
    writeRow(out, {double(l.j), double(l.k), l.xi2, l.value.real(), l.value.imag(),
                   l.value.imag() / p.epsilon});
}

LatticePrediction readPrediction(std::istream& in) {
  const DelimitedTable t = readDelimited(in);
  LatticePrediction p;
  p.direction = RationalDirection::make(static_cast<int>(t.headerDouble("m")),
                                       static_cast<int>(t.headerDouble("n")));
  p.orientation = static_cast<int>(t.headerDouble("orientation"));
  p.energy = t.headerDouble("energy");
  p.h = t.headerDouble("h");
  p.epsilon = t.headerDouble("epsilon");
  p.q_inf = t.headerDouble("q_inf");
  p.t_min = t.headerDouble("t_min");
  p.second_derivative_b = t.headerDouble("second_derivative_b");
  p.curvature_p = t.headerDouble("curvature_p");
  p.calibration_factor = t.headerDouble("calibration_factor");
  p.ladder_prefactor = {t.headerDouble("ladder_prefactor_re"), t.headerDouble("ladder_prefactor_im")};
  p.in_window = t.header("in_window") == "true";
  if (t.hasHeader("window_note")) p.window_note = t.header("window_note");
  const std::size_t cj = t.column("j"), ck = t.column("k"), cx = t.column("xi2"),
                    cr = t.column("re"), ci = t.column("im");
  for (const auto& row : t.rows) {
    const int j = static_cast<int>(row[cj]);
    if (p.xi2_values.empty() || p.predictions.back().j != j) p.xi2_values.push_back(row[cx]);
    p.predictions.push_back({j, static_cast<int>(row[ck]), row[cx], {row[cr], row[ci]}});
  }
  return p;
}

void writeMatchReport(std::ostream& out, const MatchReport& r, double h, double epsilon) {
  out << "# torspec match report v1\n";
  writeHeader(out, "h", h);
  writeHeader(out, "epsilon", epsilon);
  writeHeader(out, "matched", std::to_string(r.pairs.size()));
  writeHeader(out, "unmatched_predicted", std::to_string(r.unmatched_predicted));
  writeHeader(out, "unmatched_computed", std::to_string(r.unmatched_computed));
  writeHeader(out, "rms_rescaled_error", r.rms_rescaled_error);
  writeColumns(out, {"pred_re", "pred_im", "comp_re", "comp_im", "distance"});
  for (const auto& p : r.pairs)
    writeRow(out, {p.predicted.real(), p.predicted.imag(), p.computed.real(), p.computed.imag(),
                   p.distance});
}

MatchReport readMatchReport(std::istream& in) {
  const DelimitedTable t = readDelimited(in);
  MatchReport r;
  r.unmatched_predicted = static_cast<std::size_t>(t.headerDouble("unmatched_predicted"));
  r.unmatched_computed = static_cast<std::size_t>(t.headerDouble("unmatched_computed"));
  r.rms_rescaled_error = t.headerDouble("rms_rescaled_error");
  const std::size_t pr = t.column("pred_re"), pi = t.column("pred_im"), cr = t.column("comp_re"),
                    ci = t.column("comp_im"), d = t.column("distance");
  for (const auto& row : t.rows)
    r.pairs.push_back({{row[pr], row[pi]}, {row[cr], row[ci]}, row[d]});
  return r;
}

}  // namespace torspec
