#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torspec/dense_eig.hpp"

namespace torspec {

/// Fourier multiplier g(xi) with its derivative.
struct Multiplier {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// k(x, xi) phi(xi / eps^delta) with k(x, xi) = sum c(nu, d) e^{i nu x} xi^d.
struct MixedTerm {
  std::map<std::pair<int, int>, cplx> coeffs;  // (nu, d) -> c
  double delta = 0.0;
  std::function<double(double)> phi;
};

/// g(hD)(hD)^2 + i eps (V(x) + k(x, hD) phi(hD / eps^delta)) on L^2 of the
/// circle with Floquet shift theta: modes e^{i (j + theta) x}, |j| <= J_max.
struct Model1D {
  double h = 0.01;
  double epsilon = 1.0;
  double theta = 0.0;
  /// V^(nu); must satisfy V^(-nu) = conj V^(nu).
  std::map<int, cplx> potential;
  std::optional<Multiplier> g;
  std::optional<MixedTerm> mixed;
  /// Truncation half-width; 0 selects the smallest admissible value.
  int j_max = 0;
  /// |z| of the spectral region of interest, used by the J_max rule.
  double target_abs_z = 0.0;
};

/// V = a (1 - cos x): V^(0) = a, V^(+-1) = -a/2.
std::map<int, cplx> oneMinusCosine(double amplitude = 1.0);

/// Real trigonometric polynomial V(x) from its coefficients.
double potentialValue(const std::map<int, cplx>& v, double x);

struct PotentialExtrema {
  double min = 0.0;
  double x_min = 0.0;
  double max = 0.0;
  double second_derivative_at_min = 0.0;
  bool repeated_minimum = false;
};

PotentialExtrema potentialExtrema(const std::map<int, cplx>& v);

/// Smallest J with h^2 (J - theta)^2 >= 10 (target |z| + eps max V).
int jMaxRule(const Model1D& model);

/// Checks the model invariants: real V, g >= 1 and |xi g'(xi)| <= 0.1 on
/// the truncation lattice, tail ellipticity. Returns the J_max in use.
/// Throws InvalidArgument or TruncationTooSmall.
int validateModel(const Model1D& model);

/// Dense matrix of dimension 2 J_max + 1, rows and columns ordered by
/// j = -J_max..J_max. The mixed term is quantized on the left: its
/// xi-dependence is evaluated at the column frequency h (j' + theta).
CMatrix assemble1D(const Model1D& model);

/// The `count` eigenvalues nearest to i eps min V, sorted by |z - i eps min V|
/// and then by argument. Throws DegenerateMinimum when V has no unique
/// nondegenerate minimum.
std::vector<cplx> lowLyingSpectrum(const Model1D& model, std::size_t count,
                                   const EigOptions& options = {});

/// sigma_min(A - z I).
double smallestSingularValue(const CMatrix& a, cplx z);

/// Grid Re z in [re_min, re_max] (n_re points) times im_values, for the
/// rescaled operator P_eps / eps - z.
struct ZRegion {
  double re_min = 0.0;
  double re_max = 0.0;
  int n_re = 16;
  std::vector<double> im_values{0.0};
  /// |z| >= c_cutoff h~.
  double c_cutoff = 1.0;
  /// |Im z| <= c_im h~.
  double c_im = 1.0;
  /// h~ |z|^{1/2} <= smallness.
  double smallness = 0.1;
};

struct ResolventProbe {
  double h = 0.0;
  double epsilon = 0.0;
  double h_tilde = 0.0;
  std::vector<cplx> z_grid;
  std::vector<double> sigma_min;
  /// h~^{2/3} |z|^{1/3}.
  std::vector<double> bound_value;
  double fitted_c = 0.0;
};

/// min sigma / bound over grid points with |z| >= c_cutoff h~.
double fittedConstant(const ResolventProbe& probe, double c_cutoff);

/// Throws RegionViolatesHypotheses when a grid point leaves the region
/// |z| >= C h~, |Im z| <= C1 h~, h~ |z|^{1/2} <= smallness.
ResolventProbe resolventBoundScan(const Model1D& model, const ZRegion& region);

void writeProbe(std::ostream& out, const ResolventProbe& p);
ResolventProbe readProbe(std::istream& in);

}  // namespace torspec
