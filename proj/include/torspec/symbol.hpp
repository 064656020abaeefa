#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "torspec/matrix.hpp"

namespace torspec {

/// Largest supported band limit.
inline constexpr int kMaxSymbolDegree = 8;

/// A point (x, y; xi, eta) of T*T^2 with angles reduced to [0, 2pi).
struct PhasePoint {
  double x = 0.0;
  double y = 0.0;
  double xi = 0.0;
  double eta = 0.0;

  static PhasePoint make(double x, double y, double xi, double eta);
};

/// Fourier coefficient tables of q = q0(x,y) + q1(x,y) xi + q2(x,y) eta,
/// each q_l a real trigonometric polynomial of degree <= F, stored densely
/// over [-F, F]^2. Immutable; use withCoefficient() to derive variants.
class SymbolCoefficients {
 public:
  /// Zero symbol of the given degree.
  SymbolCoefficients(int degree, double kappa, std::optional<std::uint64_t> seed = std::nullopt);

  int degree() const noexcept { return degree_; }
  double kappa() const noexcept { return kappa_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }

  /// q^_l(j, k); zero outside [-F, F]^2.
  cplx coeff(int ell, int j, int k) const noexcept;

  /// q^(j, k; xi, eta) = q^_0 + q^_1 xi + q^_2 eta.
  cplx combined(int j, int k, double xi, double eta) const noexcept {
    return coeff(0, j, k) + coeff(1, j, k) * xi + coeff(2, j, k) * eta;
  }

  /// Copy with q^_l(j,k) = value and q^_l(-j,-k) = conj(value). For
  /// (j,k) = (0,0) the value must be real.
  SymbolCoefficients withCoefficient(int ell, int j, int k, cplx value) const;

  /// Largest |q^_l(-j,-k) - conj q^_l(j,k)| over the table.
  double hermitianDefect() const noexcept;

  /// Sum over l, (j,k) of |q^_l(j,k)|.
  double l1Norm() const noexcept;

  bool operator==(const SymbolCoefficients& other) const = default;

 private:
  friend SymbolCoefficients readSymbol(std::istream& in);
  std::size_t index(int ell, int j, int k) const noexcept {
    const int w = 2 * degree_ + 1;
    return static_cast<std::size_t>(ell * w * w + (j + degree_) * w + (k + degree_));
  }

  int degree_ = 0;
  double kappa_ = 1.0;
  std::optional<std::uint64_t> seed_;
  std::vector<cplx> table_;
};

/// Random symbol: A_l(j,k) = exp(-kappa |j-k|) alpha^l_{j,k} with alpha
/// standard normal, q^_l(j,k) = (A_l(j,k) + conj A_l(-j,-k)) / 2.
///
/// Draws come from std::mt19937_64 seeded with `seed`: each output word w
/// gives u = ((w >> 11) + 0.5) * 2^-53 in (0,1), consecutive pairs of u go
/// through Box-Muller (both outputs used), and alpha is consumed in the
/// order l = 0..2, j = -F..F, k = -F..F. The coefficient file, not the
/// seed, is the portable artifact.
SymbolCoefficients generateRandomSymbol(int degree, double kappa, std::uint64_t seed);

/// The raw complex sum; its imaginary part is rounding noise.
cplx evaluateSymbolRaw(const SymbolCoefficients& q, const PhasePoint& p);

/// q(x, y; xi, eta).
double evaluateSymbol(const SymbolCoefficients& q, const PhasePoint& p);

/// Text exchange format: header lines `F`, `kappa`, `seed`, then one line
/// `ell j k re im` per coefficient with 17 significant digits.
void writeSymbol(std::ostream& out, const SymbolCoefficients& q);
SymbolCoefficients readSymbol(std::istream& in);
void saveSymbol(const std::string& path, const SymbolCoefficients& q);
SymbolCoefficients loadSymbol(const std::string& path);

}  // namespace torspec
