#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "torspec/classical.hpp"
#include "torspec/spectral2d.hpp"

namespace torspec {

/// lambda0_k = e^{i pi/4} (curvature_p b'')^{1/2} (k + 1/2), k = 0..k_max.
std::vector<cplx> harmonicLadder(double second_derivative_b, double curvature_p, int k_max);

struct LatticePoint {
  /// Index s of xi2 = h s / |(m, n)|.
  int j = 0;
  int k = 0;
  double xi2 = 0.0;
  /// a(xi2) + i eps b(xi2) + sqrt(eps) h lambda0_k(xi2).
  cplx value;
};

/// Leading-order eigenvalue lattice near the rational torus of direction
/// (m, n) on the energy circle. xi2 is the momentum along the orbits,
/// quantized as h (-j n + k m) / |(m, n)| for a mode (j, k): spacing
/// h / |(m, n)|, offset theta2 = 0. a(xi2) = xi2^2 and b(xi2) is the
/// minimum of the secular average on the torus with momentum xi2 times the
/// unit orbit direction. The num.4 angle t equals |(m, n)| x1, so
/// d^2/dx1^2 = |(m, n)|^2 d^2/dt^2; this chain-rule factor is carried in
/// curvature_p = 2 |(m, n)|^2 and reported as calibration_factor = |(m, n)|.
struct LatticePrediction {
  RationalDirection direction;
  /// +1 for momentum along (-n, m), -1 for the opposite torus.
  int orientation = 1;
  double energy = 0.0;
  double h = 0.0;
  double epsilon = 0.0;
  std::vector<double> xi2_values;
  /// Ordered by j, then k.
  std::vector<LatticePoint> predictions;
  /// lambda0_1 - lambda0_0 at the central xi2, times sqrt(eps) h.
  cplx ladder_prefactor;
  double calibration_factor = 1.0;
  double curvature_p = 2.0;
  /// Data at the central xi2.
  double q_inf = 0.0;
  double t_min = 0.0;
  double second_derivative_b = 0.0;
  /// Advisory check h^{9/8} <= eps <= h^{18/19}.
  bool in_window = true;
  std::string window_note;

  std::vector<cplx> values() const;
};

/// Throws DegenerateMinimum when the secular average at the central torus
/// has a degenerate or repeated minimum.
LatticePrediction predictLattice(const SymbolCoefficients& q, const RationalDirection& dir,
                                 double energy, double h, double epsilon, int j_range, int k_max,
                                 int orientation = 1);

enum class LegSide { Below, Above };

/// Eigenvalues with Im z / eps below inf_band - margin (or above
/// sup_band + margin), sorted by ascending Im z / eps.
std::vector<cplx> extractLeg(const SpectrumRecord& spectrum, double inf_band, double sup_band,
                             LegSide side, double margin);

struct MatchPair {
  cplx predicted;
  cplx computed;
  double distance = 0.0;
};

struct MatchReport {
  std::vector<MatchPair> pairs;
  std::size_t unmatched_predicted = 0;
  std::size_t unmatched_computed = 0;
  double rms_rescaled_error = 0.0;
};

/// d(z, w) = (|Re(z - w)| + |Im(z - w)|) / (sqrt(eps) h).
double rescaledDistance(cplx z, cplx w, double h, double epsilon);

/// Greedy injective pairing by increasing rescaled distance, pairs farther
/// than 2 are left unmatched.
MatchReport matchSpectra(const std::vector<cplx>& predicted, const std::vector<cplx>& computed,
                         double h, double epsilon);
MatchReport matchSpectra(const LatticePrediction& predicted, const std::vector<cplx>& computed);

void writePrediction(std::ostream& out, const LatticePrediction& p);
LatticePrediction readPrediction(std::istream& in);
void writeMatchReport(std::ostream& out, const MatchReport& r, double h, double epsilon);
MatchReport readMatchReport(std::istream& in);

}  // namespace torspec
