#include "torspec/symbol.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "torspec/error.hpp"

namespace torspec {

namespace {

double reduceAngle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

void checkDegree(int degree) {
  if (degree < 0 || degree > kMaxSymbolDegree)
    fail(ErrorKind::InvalidArgument,
         "symbol degree must lie in [0, " + std::to_string(kMaxSymbolDegree) + "], got " +
             std::to_string(degree));
}

class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

 private:
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::string formatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

}  // namespace

PhasePoint PhasePoint::make(double x, double y, double xi, double eta) {
  return {reduceAngle(x), reduceAngle(y), xi, eta};
}

SymbolCoefficients::SymbolCoefficients(int degree, double kappa,
                                       std::optional<std::uint64_t> seed)
    : degree_(degree), kappa_(kappa), seed_(seed) {
  checkDegree(degree);
  if (!(kappa > 0.0)) fail(ErrorKind::InvalidArgument, "kappa must be positive");
  const std::size_t w = static_cast<std::size_t>(2 * degree + 1);
  table_.assign(3 * w * w, cplx{});
}

cplx SymbolCoefficients::coeff(int ell, int j, int k) const noexcept {
  if (ell < 0 || ell > 2 || std::abs(j) > degree_ || std::abs(k) > degree_) return {};
  return table_[index(ell, j, k)];
}

SymbolCoefficients SymbolCoefficients::withCoefficient(int ell, int j, int k, cplx value) const {
  if (ell < 0 || ell > 2) fail(ErrorKind::InvalidArgument, "symbol component must be 0, 1 or 2");
  if (std::abs(j) > degree_ || std::abs(k) > degree_)
    fail(ErrorKind::InvalidArgument, "coefficient index outside [-F, F]^2");
  if (j == 0 && k == 0 && value.imag() != 0.0)
    fail(ErrorKind::InvalidArgument, "the (0,0) coefficient of a real symbol must be real");
  SymbolCoefficients out = *this;
  out.table_[index(ell, j, k)] = value;
  out.table_[index(ell, -j, -k)] = std::conj(value);
  return out;
}

double SymbolCoefficients::hermitianDefect() const noexcept {
  double worst = 0.0;
  for (int ell = 0; ell < 3; ++ell)
    for (int j = -degree_; j <= degree_; ++j)
      for (int k = -degree_; k <= degree_; ++k)
        worst = std::max(worst, std::abs(coeff(ell, -j, -k) - std::conj(coeff(ell, j, k))));
  return worst;
}

double SymbolCoefficients::l1Norm() const noexcept {
  double s = 0.0;
  for (const cplx& c : table_) s += std::abs(c);
  return s;
}

SymbolCoefficients generateRandomSymbol(int degree, double kappa, std::uint64_t seed) {
  SymbolCoefficients q(degree, kappa, seed);
  const int w = 2 * degree + 1;
  GaussianStream gauss(seed);
  // A_l(j,k) = exp(-kappa |j-k|) alpha, then symmetrize.
  std::vector<double> amp(static_cast<std::size_t>(3 * w * w));
  for (int ell = 0; ell < 3; ++ell)
    for (int j = -degree; j <= degree; ++j)
      for (int k = -degree; k <= degree; ++k) {
        const double alpha = gauss.next();
        amp[static_cast<std::size_t>(ell * w * w + (j + degree) * w + (k + degree))] =
            std::exp(-kappa * std::abs(j - k)) * alpha;
      }
  auto a = [&](int ell, int j, int k) {
    return amp[static_cast<std::size_t>(ell * w * w + (j + degree) * w + (k + degree))];
  };
  for (int ell = 0; ell < 3; ++ell)
    for (int j = -degree; j <= degree; ++j)
      for (int k = -degree; k <= degree; ++k) {
        if (j < 0 || (j == 0 && k < 0)) continue;
        const cplx value = 0.5 * (a(ell, j, k) + std::conj(cplx{a(ell, -j, -k)}));
        q = q.withCoefficient(ell, j, k, j == 0 && k == 0 ? cplx{value.real()} : value);
      }
  return q;
}

cplx evaluateSymbolRaw(const SymbolCoefficients& q, const PhasePoint& p) {
  const int f = q.degree();
  // Powers e^{i j x} and e^{i k y} for j, k in [-F, F].
  std::vector<cplx> px(static_cast<std::size_t>(2 * f + 1));
  std::vector<cplx> py(px.size());
  px[static_cast<std::size_t>(f)] = py[static_cast<std::size_t>(f)] = 1.0;
  for (int j = 1; j <= f; ++j) {
    px[static_cast<std::size_t>(f + j)] = std::polar(1.0, j * p.x);
    px[static_cast<std::size_t>(f - j)] = std::conj(px[static_cast<std::size_t>(f + j)]);
    py[static_cast<std::size_t>(f + j)] = std::polar(1.0, j * p.y);
    py[static_cast<std::size_t>(f - j)] = std::conj(py[static_cast<std::size_t>(f + j)]);
  }
  cplx sum = 0.0;
  for (int j = -f; j <= f; ++j) {
    cplx row = 0.0;
    for (int k = -f; k <= f; ++k)
      row += q.combined(j, k, p.xi, p.eta) * py[static_cast<std::size_t>(f + k)];
    sum += row * px[static_cast<std::size_t>(f + j)];
  }
  return sum;
}

double evaluateSymbol(const SymbolCoefficients& q, const PhasePoint& p) {
  return evaluateSymbolRaw(q, p).real();
}

void writeSymbol(std::ostream& out, const SymbolCoefficients& q) {
  out << "# torspec symbol v1\n";
  out << "F " << q.degree() << "\n";
  out << "kappa " << formatDouble(q.kappa()) << "\n";
  if (q.seed())
    out << "seed " << *q.seed() << "\n";
  else
    out << "seed none\n";
  out << "# ell j k re im\n";
  const int f = q.degree();
  for (int ell = 0; ell < 3; ++ell)
    for (int j = -f; j <= f; ++j)
      for (int k = -f; k <= f; ++k) {
        const cplx c = q.coeff(ell, j, k);
        out << ell << ' ' << j << ' ' << k << ' ' << formatDouble(c.real()) << ' '
            << formatDouble(c.imag()) << "\n";
      }
}

SymbolCoefficients readSymbol(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<int> degree;
  std::optional<double> kappa;
  std::optional<std::uint64_t> seed;
  bool seed_seen = false;
  std::optional<SymbolCoefficients> q;
  std::vector<bool> seen;
  auto bad = [&](const std::string& msg) -> void {
    fail(ErrorKind::IoError, "symbol file line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (!q) {
      std::string key;
      ls >> key;
      if (key == "F") {
        int f;
        if (!(ls >> f)) bad("malformed F");
        degree = f;
      } else if (key == "kappa") {
        std::string v;
        ls >> v;
        kappa = std::strtod(v.c_str(), nullptr);
      } else if (key == "seed") {
        std::string v;
        ls >> v;
        seed_seen = true;
        if (v != "none") seed = std::stoull(v);
      } else {
        bad("unexpected header key '" + key + "'");
      }
      if (degree && kappa && seed_seen) {
        q.emplace(*degree, *kappa, seed);
        const std::size_t w = static_cast<std::size_t>(2 * *degree + 1);
        seen.assign(3 * w * w, false);
      }
      continue;
    }
    int ell, j, k;
    std::string re, im;
    if (!(ls >> ell >> j >> k >> re >> im)) bad("expected 'ell j k re im'");
    if (ell < 0 || ell > 2 || std::abs(j) > q->degree() || std::abs(k) > q->degree())
      bad("coefficient index out of range");
    const std::size_t idx = q->index(ell, j, k);
    q->table_[idx] = cplx{std::strtod(re.c_str(), nullptr), std::strtod(im.c_str(), nullptr)};
    seen[idx] = true;
  }
  if (!q) fail(ErrorKind::IoError, "symbol file: missing F/kappa/seed header");
  for (bool s : seen)
    if (!s) fail(ErrorKind::IoError, "symbol file: incomplete coefficient table");
  if (q->hermitianDefect() > 1e-14 * std::max(1.0, q->l1Norm()))
    fail(ErrorKind::IoError, "symbol file: coefficients violate Hermitian symmetry");
  return *q;
}

void saveSymbol(const std::string& path, const SymbolCoefficients& q) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  writeSymbol(out, q);
}

SymbolCoefficients loadSymbol(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open symbol file '" + path + "'");
  return readSymbol(in);
}

}  // namespace torspec
