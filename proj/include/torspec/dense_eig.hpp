#pragma once

#include <cstddef>
#include <vector>

#include "torspec/matrix.hpp"

namespace torspec {

struct HessenbergResult {
  CMatrix h;
  // Unitary Q with Q* A Q = H. Empty unless accumulation was requested.
  CMatrix q;
};

/// Householder reduction to upper Hessenberg form. Columns whose
/// below-subdiagonal part is already zero are left untouched, so Hessenberg
/// input comes back unchanged.
HessenbergResult hessenbergReduce(const CMatrix& a, bool accumulate_q = false);

enum class EigBackend {
  /// LAPACK for n >= kLapackThreshold, in-house otherwise.
  Auto,
  InHouse,
  /// zgehrd + zhseqr from the system LAPACK.
  Lapack,
};

inline constexpr std::size_t kLapackThreshold = 400;

struct EigOptions {
  /// Relative deflation threshold: |h(i+1,i)| <= tol * (|h(i,i)| + |h(i+1,i+1)|).
  double tol = 1e-12;
  /// Cap on the total number of QR sweeps; 0 means 100 * n.
  std::size_t max_sweeps = 0;
  /// Largest acceptable normalized eigenpair residual.
  double residual_tol = 1e-8;
  /// Skip the O(n^2)-per-eigenvalue residual probes.
  bool skip_residuals = false;
  /// Number of eigenvalues probed for residuals, evenly spread over the
  /// returned list; 0 probes every eigenvalue.
  std::size_t max_probes = 64;
  EigBackend backend = EigBackend::Auto;
};

struct EigResult {
  std::vector<cplx> eigenvalues;
  /// max over eigenpairs of ||H v - lambda v|| / (||v|| ||H||_F), with v from
  /// one step of inverse iteration. NaN when probes were skipped.
  double max_residual = 0.0;
  /// Number of QR sweeps performed (0 for the LAPACK backend).
  std::size_t iterations = 0;
  std::size_t probes = 0;
  bool used_lapack = false;
};

/// In-house implicit single-shift (Wilkinson) complex QR on an upper
/// Hessenberg matrix. Eigenvalues are returned in deflation order.
/// Throws Error(ConvergenceFailure) when the sweep cap is exceeded or the
/// residual probes exceed options.residual_tol.
EigResult qrEigenvalues(CMatrix h, const EigOptions& options = {});

/// Full pipeline: Hessenberg reduction followed by QR iteration, on the
/// backend selected by options.backend.
EigResult eigenvalues(const CMatrix& a, const EigOptions& options = {});

/// Residual probes for given eigenvalue estimates of a Hessenberg matrix.
/// Returns ||H x - lambda x|| / ||x|| for each lambda, x from inverse iteration.
std::vector<double> hessenbergResiduals(const CMatrix& h,
                                        const std::vector<cplx>& lambdas);

/// Smallest singular value via Householder bidiagonalization and Sturm
/// bisection on the Golub-Kahan tridiagonal.
double singularMin(const CMatrix& a);

/// All singular values in ascending order, same route as singularMin.
std::vector<double> singularValues(const CMatrix& a);

}  // namespace torspec
