#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "torspec/dense_eig.hpp"
#include "torspec/symbol.hpp"

namespace torspec {

struct LatticeMode {
  int j = 0;
  int k = 0;
  auto operator<=>(const LatticeMode&) const = default;
};

/// Fourier modes (j, k) with h^2 (j^2 + k^2) in [E1, E2], lexicographic.
struct ModeShell {
  double h = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  std::vector<LatticeMode> modes;

  std::size_t size() const noexcept { return modes.size(); }
  /// pi (E2 - E1) / h^2.
  double areaEstimate() const noexcept;
};

/// Shell membership uses the integer j^2 + k^2 against [E1/h^2, E2/h^2]
/// widened by a relative 1e-12, so lattice points exactly on the
/// boundary circles are kept.
bool inShell(double h, double e1, double e2, long long j, long long k) noexcept;

/// Throws EmptyShell when no lattice point qualifies.
ModeShell buildModeShell(double h, double e1, double e2);

/// Dense matrix of -h^2 Laplacian + i eps q(x, y; hD) on the shell modes:
/// a((j,k),(j',k')) = h^2 (j^2 + k^2) delta
///   + i eps (q0^(d) + q1^(d) h j' + q2^(d) h k'),  d = (j - j', k - k').
struct ShellMatrix {
  ModeShell shell;
  double epsilon = 0.0;
  CMatrix entries;
};

ShellMatrix assembleMatrix(const SymbolCoefficients& q, const ModeShell& shell, double epsilon);

struct SpectrumMetadata {
  double e1 = 0.0;
  double e2 = 0.0;
  int degree = 0;
  double kappa = 0.0;
  std::optional<std::uint64_t> seed;
};

struct SpectrumRecord {
  double h = 0.0;
  double epsilon = 0.0;
  SpectrumMetadata meta;
  std::vector<cplx> eigenvalues;
  /// max ||A v - lambda v|| / ||A||_F over the probed eigenpairs.
  double residual_bound = 0.0;
  std::size_t residual_probes = 0;
  /// |sum lambda - tr A| and the allowed 1e-8 n max|a_ij|.
  double trace_error = 0.0;
  double trace_tolerance = 0.0;
  bool trace_ok = true;
  /// (Re z, Im z / eps), empty when eps == 0.
  std::vector<std::pair<double, double>> rescaled;
};

/// Full spectrum of the shell matrix. Throws ConvergenceFailure on solver
/// failure.
SpectrumRecord computeSpectrum(const ShellMatrix& a, const EigOptions& options = {});

/// Delimited text: '#' header with h, eps, E1, E2, F, kappa, seed,
/// residual_bound, trace check; then `re im im_over_eps` rows.
void writeSpectrum(std::ostream& out, const SpectrumRecord& s);
SpectrumRecord readSpectrum(std::istream& in);
void saveSpectrum(const std::string& path, const SpectrumRecord& s);
SpectrumRecord loadSpectrum(const std::string& path);

/// Re window [E1 + 3 max(h, eps), E2 - 3 max(h, eps)] clear of shell edge effects.
std::pair<double, double> interiorWindow(const SpectrumRecord& s);

struct BandContainment {
  double re_lo = 0.0;
  double re_hi = 0.0;
  std::size_t interior_count = 0;
  double observed_min = 0.0;
  double observed_max = 0.0;
  /// Smallest delta >= 0 with Im z / eps in [inf_band - delta, sup_band + delta]
  /// for every eigenvalue with Re z in [re_lo, re_hi].
  double delta = 0.0;
};

/// Requires eps > 0.
BandContainment bandContainment(const SpectrumRecord& s, double inf_band, double sup_band,
                                double re_lo, double re_hi);

}  // namespace torspec
