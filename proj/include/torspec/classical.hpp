#pragma once

#include <map>
#include <utility>
#include <vector>

#include "torspec/symbol.hpp"

namespace torspec {

/// Primitive integer direction (m, n) of a rational torus, canonical sign
/// m > 0, or m == 0 and n == 1. The orbits on the torus run along the unit
/// cotangent direction (-n, m) / |(m, n)|.
struct RationalDirection {
  int m = 1;
  int n = 0;

  /// Validates primitivity and canonicalizes the sign.
  static RationalDirection make(int m, int n);

  double length() const noexcept;
  int height() const noexcept;  // max(|m|, |n|)
  /// (xi, eta) = (-n, m) / |(m, n)|.
  std::pair<double, double> unitCotangent() const noexcept;

  auto operator<=>(const RationalDirection&) const = default;
};

/// All primitive (m, n) in [-F, F]^2 up to sign, sorted lexicographically.
std::vector<RationalDirection> rationalDirections(int degree);

/// The trigonometric polynomial t -> sum_{|mu| <= M} q^(mu (m, n); xi, eta) e^{i mu t},
/// M = floor(F / max(|m|, |n|)).
class SecularPolynomial {
 public:
  SecularPolynomial(const SymbolCoefficients& q, const RationalDirection& dir, double xi,
                    double eta);
  /// Real trigonometric polynomial from coefficients c_{-M..M}, c_{-mu} = conj c_mu.
  explicit SecularPolynomial(std::vector<cplx> centered);

  int order() const noexcept { return order_; }
  double value(double t) const;
  double derivative(double t) const;
  double secondDerivative(double t) const;
  /// The mu = 0 term, i.e. the torus average.
  double mean() const noexcept { return coeffs_[static_cast<std::size_t>(order_)].real(); }
  bool constant() const noexcept;

 private:
  double evalDerivative(double t, int order) const;
  int order_ = 0;
  std::vector<cplx> coeffs_;  // index mu + order_
};

double secularAverage(const SymbolCoefficients& q, const RationalDirection& dir, double xi,
                      double eta, double t);

struct QInfinityInterval {
  RationalDirection direction;
  double xi = 0.0;
  double eta = 0.0;
  double torus_average = 0.0;
  double q_inf = 0.0;
  double q_sup = 0.0;
  double t_min = 0.0;
  double t_max = 0.0;
  double second_derivative_at_min = 0.0;
  double torus_min_q = 0.0;
  double torus_max_q = 0.0;
  /// True when another local minimum comes within 1e-9 of q_inf.
  bool repeated_minimum = false;
};

struct TExtrema {
  double t_min = 0.0;
  double min = 0.0;
  double t_max = 0.0;
  double max = 0.0;
  bool repeated_minimum = false;
};

/// Global extrema of the secular polynomial over [0, 2pi): 8192-point scan
/// followed by Newton refinement of every discrete local extremum.
TExtrema secularExtrema(const SecularPolynomial& p);

/// Q_inf interval on the torus (xi, eta) = sqrt(energy) (-n, m) / |(m, n)|.
/// With `strict`, throws DegenerateMinimum when the polynomial is not
/// constant and its second derivative at the minimum is below 1e-9.
QInfinityInterval qInfinityInterval(const SymbolCoefficients& q, const RationalDirection& dir,
                                    double energy, bool strict = true);

/// Same on an explicit cotangent point, which must be parallel to the
/// direction's orbit direction (either orientation).
QInfinityInterval qInfinityIntervalAt(const SymbolCoefficients& q, const RationalDirection& dir,
                                      double xi, double eta, bool strict = true);

struct TorusExtrema {
  double min = 0.0;
  double max = 0.0;
};

/// Extrema of (x, y) -> q(x, y; xi, eta) by grid sampling followed by
/// Newton refinement. grid = 512 reproduces the reference accuracy.
TorusExtrema torusExtrema(const SymbolCoefficients& q, double xi, double eta, int grid = 512);

/// <q>_T at a phase point via the closed form
/// sum_k e^{i k.x} q^(k; xi) Khat(T k.p'(xi)), p' = (2 xi, 2 eta),
/// Khat(s) = 2 sin(s/2) / s.
double finiteTimeAverage(const SymbolCoefficients& q, const PhasePoint& point, double T);

/// Khat(s) = 2 sin(s/2) / s, Khat(0) = 1.
double khat(double s);

struct BandBounds {
  double inf_band = 0.0;
  double sup_band = 0.0;
  /// Range of the sampled torus-average curve alone.
  double average_min = 0.0;
  double average_max = 0.0;
};

/// Inf / sup over the energy circle of the union of Q_inf intervals: torus
/// averages on n_samples angles avoiding rational angles, plus both
/// orientations of every direction in rationalDirections(F).
BandBounds bandBounds(const SymbolCoefficients& q, double energy, int n_samples);

/// Union of bandBounds over n_energies circles evenly spaced in [e_lo, e_hi].
BandBounds bandBoundsOverRange(const SymbolCoefficients& q, double e_lo, double e_hi,
                               int n_energies, int n_samples);

/// Band-limited Fourier series on T^2: (j, k) -> coefficient of e^{i(j x1 + k x2)}.
struct FourierSeries2D {
  std::map<std::pair<int, int>, cplx> coeffs;

  cplx evaluate(double x1, double x2) const;
  cplx coeff(int j, int k) const;
};

struct CohomologicalSolution {
  /// Solves d/dx2 u0 = v - mean2 with zero x2-mean.
  FourierSeries2D u0;
  /// Normalized instead by u(x1, 0) = 0, i.e. the integral from 0 to x2.
  FourierSeries2D u0_anchored;
  /// x2-average of v (only k = 0 coefficients).
  FourierSeries2D mean2;
};

CohomologicalSolution cohomologicalSolve(const FourierSeries2D& v);

}  // namespace torspec
