#include "torspec/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "torspec/error.hpp"

namespace torspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kScanPoints = 8192;
constexpr double kDegenerateCurvature = 1e-9;

double wrapAngle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

// Newton iteration on p'(t) = 0 started at t0, steps clamped to `maxstep`.
double refineStationary(const SecularPolynomial& p, double t0, double maxstep) {
  double t = t0;
  for (int it = 0; it < 60; ++it) {
    const double d1 = p.derivative(t);
    const double d2 = p.secondDerivative(t);
    if (std::abs(d1) <= 1e-12) break;
    double step = d2 != 0.0 ? -d1 / d2 : 0.0;
    if (!std::isfinite(step) || std::abs(step) > maxstep) step = std::copysign(maxstep, step);
    if (step == 0.0) break;
    t += step;
    maxstep = std::max(maxstep * 0.9, 1e-14);
  }
  return wrapAngle(t);
}

struct TorusDerivs {
  double v = 0.0, dx = 0.0, dy = 0.0, dxx = 0.0, dxy = 0.0, dyy = 0.0;
};

TorusDerivs torusDerivs(const SymbolCoefficients& q, double xi, double eta, double x, double y) {
  TorusDerivs d;
  const int f = q.degree();
  for (int j = -f; j <= f; ++j)
    for (int k = -f; k <= f; ++k) {
      const cplx c = q.combined(j, k, xi, eta);
      if (c == cplx{}) continue;
      const cplx e = c * std::polar(1.0, j * x + k * y);
      d.v += e.real();
      d.dx += (cplx{0.0, double(j)} * e).real();
      d.dy += (cplx{0.0, double(k)} * e).real();
      d.dxx += -double(j * j) * e.real();
      d.dxy += -double(j * k) * e.real();
      d.dyy += -double(k * k) * e.real();
    }
  return d;
}

// 2D Newton on the gradient, clamped steps.
std::pair<double, double> refineTorus(const SymbolCoefficients& q, double xi, double eta,
                                      double x, double y, double maxstep) {
  for (int it = 0; it < 40; ++it) {
    const TorusDerivs d = torusDerivs(q, xi, eta, x, y);
    if (std::hypot(d.dx, d.dy) <= 1e-13) break;
    const double det = d.dxx * d.dyy - d.dxy * d.dxy;
    if (det == 0.0) break;
    double sx = -(d.dyy * d.dx - d.dxy * d.dy) / det;
    double sy = -(-d.dxy * d.dx + d.dxx * d.dy) / det;
    const double len = std::hypot(sx, sy);
    if (len > maxstep) {
      sx *= maxstep / len;
      sy *= maxstep / len;
    }
    x += sx;
    y += sy;
  }
  return {x, y};
}

}  // namespace

RationalDirection RationalDirection::make(int m, int n) {
  if (std::gcd(std::abs(m), std::abs(n)) != 1)
    fail(ErrorKind::InvalidArgument,
         "direction (" + std::to_string(m) + ", " + std::to_string(n) + ") is not primitive");
  if (m < 0 || (m == 0 && n < 0)) {
    m = -m;
    n = -n;
  }
  return {m, n};
}

double RationalDirection::length() const noexcept { return std::hypot(double(m), double(n)); }

int RationalDirection::height() const noexcept { return std::max(std::abs(m), std::abs(n)); }

std::pair<double, double> RationalDirection::unitCotangent() const noexcept {
  const double len = length();
  return {-double(n) / len, double(m) / len};
}

std::vector<RationalDirection> rationalDirections(int degree) {
  if (degree < 1) fail(ErrorKind::InvalidArgument, "rationalDirections needs F >= 1");
  std::vector<RationalDirection> out;
  for (int m = 0; m <= degree; ++m)
    for (int n = -degree; n <= degree; ++n) {
      if (std::gcd(m, std::abs(n)) != 1) continue;
      if (m == 0 && n != 1) continue;
      out.push_back({m, n});
    }
  std::sort(out.begin(), out.end());
  return out;
}

SecularPolynomial::SecularPolynomial(const SymbolCoefficients& q, const RationalDirection& dir,
                                     double xi, double eta)
    : order_(q.degree() / dir.height()) {
  coeffs_.resize(static_cast<std::size_t>(2 * order_ + 1));
  for (int mu = -order_; mu <= order_; ++mu)
    coeffs_[static_cast<std::size_t>(mu + order_)] = q.combined(mu * dir.m, mu * dir.n, xi, eta);
}

SecularPolynomial::SecularPolynomial(std::vector<cplx> centered)
    : order_(static_cast<int>(centered.size() / 2)), coeffs_(std::move(centered)) {
  if (coeffs_.size() % 2 == 0)
    fail(ErrorKind::InvalidArgument, "trigonometric polynomial needs 2M+1 coefficients");
}

double SecularPolynomial::evalDerivative(double t, int order) const {
  // Pair mu and -mu: c e^{i mu t} + conj(c) e^{-i mu t} = 2 Re(c e^{i mu t}).
  double s = order == 0 ? coeffs_[static_cast<std::size_t>(order_)].real() : 0.0;
  for (int mu = 1; mu <= order_; ++mu) {
    const cplx c = coeffs_[static_cast<std::size_t>(mu + order_)];
    cplx factor = 1.0;
    for (int d = 0; d < order; ++d) factor *= cplx{0.0, double(mu)};
    s += 2.0 * (c * factor * std::polar(1.0, mu * t)).real();
  }
  return s;
}

double SecularPolynomial::value(double t) const { return evalDerivative(t, 0); }
double SecularPolynomial::derivative(double t) const { return evalDerivative(t, 1); }
double SecularPolynomial::secondDerivative(double t) const { return evalDerivative(t, 2); }

bool SecularPolynomial::constant() const noexcept {
  for (int mu = 1; mu <= order_; ++mu)
    if (coeffs_[static_cast<std::size_t>(mu + order_)] != cplx{}) return false;
  return true;
}

double secularAverage(const SymbolCoefficients& q, const RationalDirection& dir, double xi,
                      double eta, double t) {
  return SecularPolynomial(q, dir, xi, eta).value(t);
}

TExtrema secularExtrema(const SecularPolynomial& p) {
  TExtrema ext;
  if (p.constant()) {
    ext.min = ext.max = p.mean();
    return ext;
  }
  const double dt = kTwoPi / kScanPoints;
  std::vector<double> vals(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) vals[static_cast<std::size_t>(i)] = p.value(i * dt);
  std::vector<std::pair<double, double>> minima;  // (value, t)
  std::vector<std::pair<double, double>> maxima;
  for (int i = 0; i < kScanPoints; ++i) {
    const double prev = vals[static_cast<std::size_t>((i + kScanPoints - 1) % kScanPoints)];
    const double cur = vals[static_cast<std::size_t>(i)];
    const double next = vals[static_cast<std::size_t>((i + 1) % kScanPoints)];
    if (cur <= prev && cur < next) {
      const double t = refineStationary(p, i * dt, dt);
      minima.emplace_back(p.value(t), t);
    }
    if (cur >= prev && cur > next) {
      const double t = refineStationary(p, i * dt, dt);
      maxima.emplace_back(p.value(t), t);
    }
  }
  // A nonconstant trigonometric polynomial always has a strict interior
  // extremum on the circle; fall back to the raw scan if plateaus hid it.
  if (minima.empty()) {
    const auto it = std::min_element(vals.begin(), vals.end());
    const double t = double(it - vals.begin()) * dt;
    minima.emplace_back(*it, t);
  }
  if (maxima.empty()) {
    const auto it = std::max_element(vals.begin(), vals.end());
    const double t = double(it - vals.begin()) * dt;
    maxima.emplace_back(*it, t);
  }
  std::sort(minima.begin(), minima.end());
  std::sort(maxima.begin(), maxima.end());
  ext.min = minima.front().first;
  ext.t_min = minima.front().second;
  ext.max = maxima.back().first;
  ext.t_max = maxima.back().second;
  for (std::size_t i = 1; i < minima.size(); ++i) {
    double sep = std::abs(minima[i].second - ext.t_min);
    sep = std::min(sep, kTwoPi - sep);
    if (minima[i].first - ext.min <= 1e-9 && sep > 1e-6) ext.repeated_minimum = true;
  }
  return ext;
}

QInfinityInterval qInfinityIntervalAt(const SymbolCoefficients& q, const RationalDirection& dir,
                                      double xi, double eta, bool strict) {
  const SecularPolynomial poly(q, dir, xi, eta);
  const TExtrema ext = secularExtrema(poly);
  QInfinityInterval out;
  out.direction = dir;
  out.xi = xi;
  out.eta = eta;
  out.torus_average = poly.mean();
  out.q_inf = ext.min;
  out.q_sup = ext.max;
  out.t_min = ext.t_min;
  out.t_max = ext.t_max;
  out.repeated_minimum = ext.repeated_minimum;
  out.second_derivative_at_min = poly.constant() ? 0.0 : poly.secondDerivative(ext.t_min);
  if (strict && !poly.constant() && out.second_derivative_at_min < kDegenerateCurvature)
    fail(ErrorKind::DegenerateMinimum,
         "secular average along (" + std::to_string(dir.m) + ", " + std::to_string(dir.n) +
             ") has a degenerate minimum (second derivative " +
             std::to_string(out.second_derivative_at_min) + ")");
  const TorusExtrema te = torusExtrema(q, xi, eta);
  out.torus_min_q = te.min;
  out.torus_max_q = te.max;
  return out;
}

QInfinityInterval qInfinityInterval(const SymbolCoefficients& q, const RationalDirection& dir,
                                    double energy, bool strict) {
  if (!(energy > 0.0)) fail(ErrorKind::InvalidArgument, "energy must be positive");
  const auto [ux, uy] = dir.unitCotangent();
  const double r = std::sqrt(energy);
  return qInfinityIntervalAt(q, dir, r * ux, r * uy, strict);
}

TorusExtrema torusExtrema(const SymbolCoefficients& q, double xi, double eta, int grid) {
  const int f = q.degree();
  const std::size_t w = static_cast<std::size_t>(2 * f + 1);
  const std::size_t g = static_cast<std::size_t>(grid);
  const double step = kTwoPi / grid;
  // rowsum[j][iy] = sum_k c(j,k) e^{i k y}
  std::vector<cplx> rowsum(w * g);
  for (int j = -f; j <= f; ++j)
    for (std::size_t iy = 0; iy < g; ++iy) {
      cplx s = 0.0;
      for (int k = -f; k <= f; ++k) s += q.combined(j, k, xi, eta) * std::polar(1.0, k * step * double(iy));
      rowsum[static_cast<std::size_t>(j + f) * g + iy] = s;
    }
  std::vector<cplx> ex(w * g);
  for (int j = -f; j <= f; ++j)
    for (std::size_t ix = 0; ix < g; ++ix)
      ex[static_cast<std::size_t>(j + f) * g + ix] = std::polar(1.0, j * step * double(ix));

  struct Cand {
    double v;
    std::size_t ix, iy;
  };
  std::vector<Cand> lows, highs;
  const std::size_t keep = 6;
  auto consider = [&](std::vector<Cand>& list, Cand c, bool low) {
    auto better = [low](const Cand& a, const Cand& b) { return low ? a.v < b.v : a.v > b.v; };
    if (list.size() < keep) {
      list.push_back(c);
    } else {
      auto worst = std::max_element(list.begin(), list.end(), better);
      if (better(c, *worst)) *worst = c;
    }
  };
  for (std::size_t iy = 0; iy < g; ++iy)
    for (std::size_t ix = 0; ix < g; ++ix) {
      double v = 0.0;
      for (std::size_t jj = 0; jj < w; ++jj) v += (rowsum[jj * g + iy] * ex[jj * g + ix]).real();
      consider(lows, {v, ix, iy}, true);
      consider(highs, {v, ix, iy}, false);
    }
  TorusExtrema out{lows.front().v, highs.front().v};
  for (const Cand& c : lows) out.min = std::min(out.min, c.v);
  for (const Cand& c : highs) out.max = std::max(out.max, c.v);
  for (const Cand& c : lows) {
    const auto [x, y] = refineTorus(q, xi, eta, double(c.ix) * step, double(c.iy) * step, step);
    out.min = std::min(out.min, torusDerivs(q, xi, eta, x, y).v);
  }
  for (const Cand& c : highs) {
    const auto [x, y] = refineTorus(q, xi, eta, double(c.ix) * step, double(c.iy) * step, step);
    out.max = std::max(out.max, torusDerivs(q, xi, eta, x, y).v);
  }
  return out;
}

double khat(double s) {
  if (std::abs(s) < 1e-8) return 1.0 - s * s / 24.0;
  return 2.0 * std::sin(0.5 * s) / s;
}

double finiteTimeAverage(const SymbolCoefficients& q, const PhasePoint& point, double T) {
  if (!(T > 0.0)) fail(ErrorKind::InvalidArgument, "averaging time must be positive");
  const int f = q.degree();
  double s = 0.0;
  for (int j = -f; j <= f; ++j)
    for (int k = -f; k <= f; ++k) {
      const cplx c = q.combined(j, k, point.xi, point.eta);
      if (c == cplx{}) continue;
      const double freq = 2.0 * point.xi * j + 2.0 * point.eta * k;
      s += (c * std::polar(1.0, j * point.x + k * point.y)).real() * khat(T * freq);
    }
  return s;
}

BandBounds bandBounds(const SymbolCoefficients& q, double energy, int n_samples) {
  if (n_samples < 64) fail(ErrorKind::InvalidArgument, "bandBounds needs at least 64 samples");
  if (!(energy > 0.0)) fail(ErrorKind::InvalidArgument, "energy must be positive");
  const double r = std::sqrt(energy);
  std::vector<double> rational_angles;
  const auto dirs = q.degree() >= 1 ? rationalDirections(q.degree()) : std::vector<RationalDirection>{};
  for (const auto& d : dirs) {
    const auto [ux, uy] = d.unitCotangent();
    rational_angles.push_back(wrapAngle(std::atan2(uy, ux)));
    rational_angles.push_back(wrapAngle(std::atan2(-uy, -ux)));
  }
  BandBounds b;
  b.average_min = std::numeric_limits<double>::infinity();
  b.average_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_samples; ++i) {
    double phi = kTwoPi * (i + 0.5) / n_samples;
    for (double ra : rational_angles)
      if (std::abs(phi - ra) < 1e-9) phi += 1e-6;
    const double avg = q.combined(0, 0, r * std::cos(phi), r * std::sin(phi)).real();
    b.average_min = std::min(b.average_min, avg);
    b.average_max = std::max(b.average_max, avg);
  }
  b.inf_band = b.average_min;
  b.sup_band = b.average_max;
  for (const auto& d : dirs) {
    const auto [ux, uy] = d.unitCotangent();
    for (double sign : {1.0, -1.0}) {
      const TExtrema ext = secularExtrema(SecularPolynomial(q, d, sign * r * ux, sign * r * uy));
      b.inf_band = std::min(b.inf_band, ext.min);
      b.sup_band = std::max(b.sup_band, ext.max);
    }
  }
  return b;
}

BandBounds bandBoundsOverRange(const SymbolCoefficients& q, double e_lo, double e_hi,
                               int n_energies, int n_samples) {
  if (!(e_lo > 0.0) || !(e_lo <= e_hi))
    fail(ErrorKind::InvalidArgument, "bandBoundsOverRange needs 0 < e_lo <= e_hi");
  if (n_energies < 1) fail(ErrorKind::InvalidArgument, "bandBoundsOverRange needs n_energies >= 1");
  BandBounds out;
  for (int i = 0; i < n_energies; ++i) {
    const double e = n_energies == 1 ? e_lo : e_lo + (e_hi - e_lo) * i / double(n_energies - 1);
    const BandBounds b = bandBounds(q, e, n_samples);
    if (i == 0) {
      out = b;
      continue;
    }
    out.inf_band = std::min(out.inf_band, b.inf_band);
    out.sup_band = std::max(out.sup_band, b.sup_band);
    out.average_min = std::min(out.average_min, b.average_min);
    out.average_max = std::max(out.average_max, b.average_max);
  }
  return out;
}

cplx FourierSeries2D::evaluate(double x1, double x2) const {
  cplx s = 0.0;
  for (const auto& [jk, c] : coeffs) s += c * std::polar(1.0, jk.first * x1 + jk.second * x2);
  return s;
}

cplx FourierSeries2D::coeff(int j, int k) const {
  const auto it = coeffs.find({j, k});
  return it == coeffs.end() ? cplx{} : it->second;
}

CohomologicalSolution cohomologicalSolve(const FourierSeries2D& v) {
  CohomologicalSolution sol;
  std::map<int, cplx> anchor;  // u0(x1, 0) by x1-frequency
  for (const auto& [jk, c] : v.coeffs) {
    const auto [j, k] = jk;
    if (k == 0) {
      if (c != cplx{}) sol.mean2.coeffs[jk] = c;
      continue;
    }
    const cplx u = c / cplx{0.0, double(k)};
    sol.u0.coeffs[jk] = u;
    anchor[j] += u;
  }
  sol.u0_anchored = sol.u0;
  for (const auto& [j, a] : anchor)
    if (a != cplx{}) sol.u0_anchored.coeffs[{j, 0}] -= a;
  return sol;
}

}  // namespace torspec
