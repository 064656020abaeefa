#include "torspec/spectral2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

#include "torspec/error.hpp"
#include "torspec/report_io.hpp"

namespace torspec {

double ModeShell::areaEstimate() const noexcept {
  return std::numbers::pi * (e2 - e1) / (h * h);
}

bool inShell(double h, double e1, double e2, long long j, long long k) noexcept {
  const double r2 = double(j * j + k * k);
  const double lo = e1 / (h * h);
  const double hi = e2 / (h * h);
  return r2 >= lo * (1.0 - 1e-12) && r2 <= hi * (1.0 + 1e-12);
}

ModeShell buildModeShell(double h, double e1, double e2) {
  if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "h must be positive");
  if (!(e1 > 0.0) || !(e1 < e2))
    fail(ErrorKind::InvalidArgument, "mode shell needs 0 < E1 < E2");
  ModeShell shell{h, e1, e2, {}};
  const long long r = static_cast<long long>(std::ceil(std::sqrt(e2) / h)) + 1;
  for (long long j = -r; j <= r; ++j)
    for (long long k = -r; k <= r; ++k)
      if (inShell(h, e1, e2, j, k)) shell.modes.push_back({int(j), int(k)});
  if (shell.modes.empty())
    fail(ErrorKind::EmptyShell, "no lattice point with h^2|(j,k)|^2 in [" + std::to_string(e1) +
                                    ", " + std::to_string(e2) + "] for h = " + std::to_string(h));
  return shell;
}

ShellMatrix assembleMatrix(const SymbolCoefficients& q, const ModeShell& shell, double epsilon) {
  if (shell.modes.empty()) fail(ErrorKind::EmptyShell, "assembleMatrix: empty shell");
  if (!(epsilon >= 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be nonnegative");
  const std::size_t n = shell.size();
  ShellMatrix out{shell, epsilon, CMatrix(n, n)};
  std::map<LatticeMode, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(shell.modes[i], i);
  const double h = shell.h;
  const int f = q.degree();
  for (std::size_t col = 0; col < n; ++col) {
    const LatticeMode c = shell.modes[col];
    out.entries(col, col) = h * h * (double(c.j) * c.j + double(c.k) * c.k);
    if (epsilon == 0.0) continue;
    for (int dj = -f; dj <= f; ++dj)
      for (int dk = -f; dk <= f; ++dk) {
        const auto it = index.find({c.j + dj, c.k + dk});
        if (it == index.end()) continue;
        const cplx sym = q.coeff(0, dj, dk) + q.coeff(1, dj, dk) * (h * c.j) +
                         q.coeff(2, dj, dk) * (h * c.k);
        if (sym == cplx{}) continue;
        out.entries(it->second, col) += cplx{0.0, epsilon} * sym;
      }
  }
  return out;
}

SpectrumRecord computeSpectrum(const ShellMatrix& a, const EigOptions& options) {
  const std::size_t n = a.entries.rows();
  if (n == 0) fail(ErrorKind::EmptyShell, "computeSpectrum: empty matrix");
  SpectrumRecord rec;
  rec.h = a.shell.h;
  rec.epsilon = a.epsilon;
  rec.meta.e1 = a.shell.e1;
  rec.meta.e2 = a.shell.e2;
  const EigResult eig = eigenvalues(a.entries, options);
  rec.eigenvalues = eig.eigenvalues;
  rec.residual_bound = eig.max_residual;
  rec.residual_probes = eig.probes;
  cplx sum = 0.0;
  for (const cplx& z : rec.eigenvalues) sum += z;
  rec.trace_error = std::abs(sum - a.entries.trace());
  rec.trace_tolerance = 1e-8 * double(n) * a.entries.maxAbs();
  rec.trace_ok = rec.trace_error <= rec.trace_tolerance;
  if (a.epsilon > 0.0)
    for (const cplx& z : rec.eigenvalues) rec.rescaled.emplace_back(z.real(), z.imag() / a.epsilon);
  return rec;
}

void writeSpectrum(std::ostream& out, const SpectrumRecord& s) {
  out << "# torspec spectrum v1\n";
  writeHeader(out, "h", s.h);
  writeHeader(out, "epsilon", s.epsilon);
  writeHeader(out, "E1", s.meta.e1);
  writeHeader(out, "E2", s.meta.e2);
  writeHeader(out, "F", std::to_string(s.meta.degree));
  writeHeader(out, "kappa", s.meta.kappa);
  writeHeader(out, "seed", s.meta.seed ? std::to_string(*s.meta.seed) : std::string("none"));
  writeHeader(out, "dimension", std::to_string(s.eigenvalues.size()));
  writeHeader(out, "residual_bound", s.residual_bound);
  writeHeader(out, "residual_probes", std::to_string(s.residual_probes));
  writeHeader(out, "trace_error", s.trace_error);
  writeHeader(out, "trace_tolerance", s.trace_tolerance);
  writeHeader(out, "trace_ok", s.trace_ok ? "true" : "false");
  writeColumns(out, {"re", "im", "im_over_eps"});
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const cplx& z : s.eigenvalues)
    writeRow(out, {z.real(), z.imag(), s.epsilon > 0.0 ? z.imag() / s.epsilon : nan});
}

SpectrumRecord readSpectrum(std::istream& in) {
  const DelimitedTable t = readDelimited(in);
  SpectrumRecord s;
  s.h = t.headerDouble("h");
  s.epsilon = t.headerDouble("epsilon");
  s.meta.e1 = t.headerDouble("E1");
  s.meta.e2 = t.headerDouble("E2");
  s.meta.degree = static_cast<int>(t.headerDouble("F"));
  s.meta.kappa = t.headerDouble("kappa");
  const std::string seed = t.header("seed");
  if (seed != "none") s.meta.seed = std::stoull(seed);
  s.residual_bound = t.headerDouble("residual_bound");
  s.residual_probes = static_cast<std::size_t>(t.headerDouble("residual_probes"));
  s.trace_error = t.headerDouble("trace_error");
  s.trace_tolerance = t.headerDouble("trace_tolerance");
  s.trace_ok = t.header("trace_ok") == "true";
  const std::size_t re = t.column("re");
  const std::size_t im = t.column("im");
  for (const auto& row : t.rows) {
    const cplx z{row[re], row[im]};
    s.eigenvalues.push_back(z);
    if (s.epsilon > 0.0) s.rescaled.emplace_back(z.real(), z.imag() / s.epsilon);
  }
  const auto dim = static_cast<std::size_t>(t.headerDouble("dimension"));
  if (dim != s.eigenvalues.size())
    fail(ErrorKind::IoError, "spectrum file: row count does not match dimension header");
  return s;
}

void saveSpectrum(const std::string& path, const SpectrumRecord& s) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  writeSpectrum(out, s);
}

SpectrumRecord loadSpectrum(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::MissingInput, "cannot open spectrum file '" + path + "'");
  return readSpectrum(in);
}

std::pair<double, double> interiorWindow(const SpectrumRecord& s) {
  const double m = 3.0 * std::max(s.h, s.epsilon);
  return {s.meta.e1 + m, s.meta.e2 - m};
}

BandContainment bandContainment(const SpectrumRecord& s, double inf_band, double sup_band,
                                double re_lo, double re_hi) {
  if (!(s.epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "band containment needs eps > 0");
  if (!(inf_band <= sup_band)) fail(ErrorKind::InvalidArgument, "band needs inf_band <= sup_band");
  BandContainment b{re_lo, re_hi, 0, std::numeric_limits<double>::infinity(),
                    -std::numeric_limits<double>::infinity(), 0.0};
  for (const cplx& z : s.eigenvalues) {
    if (z.real() < re_lo || z.real() > re_hi) continue;
    const double r = z.imag() / s.epsilon;
    ++b.interior_count;
    b.observed_min = std::min(b.observed_min, r);
    b.observed_max = std::max(b.observed_max, r);
    b.delta = std::max({b.delta, inf_band - r, r - sup_band});
  }
  return b;
}

}  // namespace torspec
