#include "torspec/dense_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "torspec/error.hpp"

namespace torspec {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

cplx phaseOf(cplx z) {
  const double a = std::abs(z);
  return a == 0.0 ? cplx{1.0, 0.0} : z / a;
}

// Householder vector for x (in place). On return x holds v with
// P = I - beta v v* mapping the original x to alpha e_1. Returns beta
// (0 when x is already a multiple of e_1).
struct Reflector {
  double beta = 0.0;
  cplx alpha = 0.0;
};

Reflector makeReflector(std::span<cplx> x) {
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += std::norm(x[i]);
  Reflector r;
  if (tail == 0.0) {
    r.alpha = x.empty() ? cplx{} : x[0];
    return r;
  }
  const double norm = std::sqrt(std::norm(x[0]) + tail);
  const cplx ph = phaseOf(x[0]);
  r.alpha = -ph * norm;
  x[0] += ph * norm;
  const double vnorm2 = std::norm(x[0]) + tail;
  r.beta = 2.0 / vnorm2;
  return r;
}

// A[r0.., c0..c1) <- (I - beta v v*) A, v indexed from row r0.
void reflectLeft(CMatrix& a, std::span<const cplx> v, double beta, std::size_t r0,
                 std::size_t c0, std::size_t c1, std::vector<cplx>& work) {
  work.assign(c1 - c0, cplx{});
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cplx vc = std::conj(v[i]);
    const cplx* row = &a(r0 + i, c0);
    for (std::size_t j = 0; j < work.size(); ++j) work[j] += cmul(vc, row[j]);
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cplx f = beta * v[i];
    cplx* row = &a(r0 + i, c0);
    for (std::size_t j = 0; j < work.size(); ++j) row[j] -= cmul(f, work[j]);
  }
}

// A[r0..r1), c0..] <- A (I - beta v v*), v indexed from column c0.
void reflectRight(CMatrix& a, std::span<const cplx> v, double beta, std::size_t r0,
                  std::size_t r1, std::size_t c0) {
  for (std::size_t i = r0; i < r1; ++i) {
    cplx* row = &a(i, c0);
    cplx s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += cmul(row[j], v[j]);
    s *= beta;
    for (std::size_t j = 0; j < v.size(); ++j) row[j] -= cmul(s, std::conj(v[j]));
  }
}

// Givens rotation G = [[c, s], [-conj(s), c]] with G [x; y] = [r; 0].
struct Givens {
  double c = 1.0;
  cplx s = 0.0;
};

Givens makeGivens(cplx x, cplx y) {
  const double ax = std::abs(x);
  const double ay = std::abs(y);
  if (ay == 0.0) return {};
  if (ax == 0.0) return {0.0, std::conj(y) / ay};
  const double r = std::hypot(ax, ay);
  return {ax / r, cmul(x / ax, std::conj(y)) / r};
}

// Eigenvalues of [[a, b], [c, d]], larger-modulus root computed first to
// avoid cancellation.
std::pair<cplx, cplx> eig2x2(cplx a, cplx b, cplx c, cplx d) {
  const cplx m = 0.5 * (a + d);
  const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  const cplx l1 = std::abs(m + disc) >= std::abs(m - disc) ? m + disc : m - disc;
  if (l1 == cplx{}) return {0.0, 0.0};
  const cplx det = a * d - b * c;
  return {l1, det / l1};
}

cplx wilkinsonShift(const CMatrix& h, std::size_t hi) {
  const auto [l1, l2] = eig2x2(h(hi - 1, hi - 1), h(hi - 1, hi), h(hi, hi - 1), h(hi, hi));
  const cplx d = h(hi, hi);
  return std::abs(l1 - d) <= std::abs(l2 - d) ? l1 : l2;
}

// Bidiagonal diagonal / superdiagonal moduli of a square matrix.
void bidiagonalize(CMatrix a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n > 0 ? n - 1 : 0, 0.0);
  std::vector<cplx> v;
  std::vector<cplx> work;
  for (std::size_t k = 0; k < n; ++k) {
    v.resize(n - k);
    for (std::size_t i = k; i < n; ++i) v[i - k] = a(i, k);
    Reflector r = makeReflector(v);
    if (r.beta != 0.0) reflectLeft(a, v, r.beta, k, k, n, work);
    d[k] = std::abs(r.beta != 0.0 ? r.alpha : a(k, k));
    if (k + 1 >= n) break;
    v.resize(n - k - 1);
    for (std::size_t j = k + 1; j < n; ++j) v[j - k - 1] = std::conj(a(k, j));
    r = makeReflector(v);
    // Reflecting conj(row) means A <- A (I - beta v v*) clears the row tail.
    if (r.beta != 0.0) reflectRight(a, v, r.beta, k, n, k + 1);
    e[k] = std::abs(r.beta != 0.0 ? r.alpha : a(k, k + 1));
  }
}

// Number of eigenvalues below x of the 2n x 2n zero-diagonal tridiagonal
// with off-diagonals d1, e1, d2, e2, ..., dn.
std::size_t sturmCount(const std::vector<double>& offdiag2, double x, double pivmin) {
  std::size_t count = 0;
  double q = -x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (double b2 : offdiag2) {
    q = -x - b2 / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

struct GolubKahan {
  std::vector<double> offdiag2;
  double bound = 0.0;
  double pivmin = 0.0;
  std::size_t n = 0;
};

GolubKahan golubKahan(const CMatrix& a) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "singular values: matrix must be square");
  GolubKahan gk;
  gk.n = a.rows();
  std::vector<double> d, e;
  bidiagonalize(a, d, e);
  // offdiag2 holds b_1^2 ... b_{2n-1}^2 of the tridiagonal (d1, e1, d2, ..., dn).
  double maxb = 0.0;
  for (std::size_t k = 0; k < gk.n; ++k) {
    gk.offdiag2.push_back(d[k] * d[k]);
    maxb = std::max(maxb, d[k]);
    if (k < e.size()) {
      gk.offdiag2.push_back(e[k] * e[k]);
      maxb = std::max(maxb, e[k]);
    }
  }
  gk.bound = 2.0 * maxb + std::numeric_limits<double>::min();
  gk.pivmin = std::max(std::numeric_limits<double>::min(), kEps * kEps * maxb * maxb);
  return gk;
}

// k-th smallest singular value (0-based) by bisection.
double bisectSingular(const GolubKahan& gk, std::size_t k) {
  double lo = 0.0;
  double hi = gk.bound;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturmCount(gk.offdiag2, mid, gk.pivmin) > gk.n + k)
      hi = mid;
    else
      lo = mid;
    if (hi - lo <= 2.0 * kEps * hi) break;
  }
  return 0.5 * (lo + hi);
}

void attachResiduals(const CMatrix& h, double hnorm, const EigOptions& options,
                     EigResult& result) {
  if (options.skip_residuals) {
    result.max_residual = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const std::size_t n = result.eigenvalues.size();
  std::vector<cplx> probes;
  if (options.max_probes == 0 || options.max_probes >= n) {
    probes = result.eigenvalues;
  } else {
    for (std::size_t i = 0; i < options.max_probes; ++i)
      probes.push_back(result.eigenvalues[i * n / options.max_probes]);
  }
  const auto res = hessenbergResiduals(h, probes);
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  result.probes = probes.size();
  result.max_residual = hnorm > 0.0 ? worst / hnorm : worst;
  if (result.max_residual > options.residual_tol)
    fail(ErrorKind::ConvergenceFailure, "eigenpair residual " +
                                            std::to_string(result.max_residual) +
                                            " exceeds tolerance");
}

extern "C" {
void zgehrd_(const int* n, const int* ilo, const int* ihi, cplx* a, const int* lda, cplx* tau,
             cplx* work, const int* lwork, int* info);
void zhseqr_(const char* job, const char* compz, const int* n, const int* ilo, const int* ihi,
             cplx* h, const int* ldh, cplx* w, cplx* z, const int* ldz, cplx* work,
             const int* lwork, int* info);
}

// LAPACK is column-major; the transpose has the same spectrum, so the
// row-major buffer is handed over as is.
EigResult lapackEigenvalues(const CMatrix& a, const EigOptions& options) {
  const int n = static_cast<int>(a.rows());
  EigResult result;
  result.used_lapack = true;
  if (n == 0) return result;
  std::vector<cplx> buf(a.data().begin(), a.data().end());
  std::vector<cplx> tau(std::size_t(std::max(n - 1, 1)));
  const int one = 1;
  int info = 0;
  int lwork = -1;
  cplx query;
  zgehrd_(&n, &one, &n, buf.data(), &n, tau.data(), &query, &lwork, &info);
  lwork = std::max(1, static_cast<int>(query.real()));
  std::vector<cplx> work(static_cast<std::size_t>(lwork));
  zgehrd_(&n, &one, &n, buf.data(), &n, tau.data(), work.data(), &lwork, &info);
  if (info != 0) fail(ErrorKind::ConvergenceFailure, "zgehrd failed, info " + std::to_string(info));
  // Upper Hessenberg of A^T in column-major order, copied out for the probes.
  CMatrix h(a.rows(), a.rows());
  for (int c = 0; c < n; ++c)
    for (int r = 0; r <= std::min(c + 1, n - 1); ++r)
      h(std::size_t(r), std::size_t(c)) = buf[std::size_t(c) * std::size_t(n) + std::size_t(r)];
  for (int c = 0; c < n; ++c)
    for (int r = c + 2; r < n; ++r) buf[std::size_t(c) * std::size_t(n) + std::size_t(r)] = 0.0;
  result.eigenvalues.resize(std::size_t(n));
  lwork = -1;
  zhseqr_("E", "N", &n, &one, &n, buf.data(), &n, result.eigenvalues.data(), nullptr, &one,
          &query, &lwork, &info);
  lwork = std::max(1, static_cast<int>(query.real()));
  work.assign(static_cast<std::size_t>(lwork), cplx{});
  zhseqr_("E", "N", &n, &one, &n, buf.data(), &n, result.eigenvalues.data(), nullptr, &one,
          work.data(), &lwork, &info);
  if (info != 0)
    fail(ErrorKind::ConvergenceFailure, "zhseqr failed to converge, info " + std::to_string(info));
  attachResiduals(h, h.frobeniusNorm(), options, result);
  return result;
}

}  // namespace


HessenbergResult hessenbergReduce(const CMatrix& a, bool accumulate_q) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "hessenbergReduce: matrix must be square");
  const std::size_t n = a.rows();
  HessenbergResult out{a, accumulate_q ? CMatrix::identity(n) : CMatrix{}};
  CMatrix& h = out.h;
  std::vector<cplx> v;
  std::vector<cplx> work;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    v.resize(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) v[i - k - 1] = h(i, k);
    const Reflector r = makeReflector(v);
    if (r.beta == 0.0) continue;
    reflectLeft(h, v, r.beta, k + 1, k, n, work);
    reflectRight(h, v, r.beta, 0, n, k + 1);
    h(k + 1, k) = r.alpha;
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
    if (accumulate_q) reflectRight(out.q, v, r.beta, 0, n, k + 1);
  }
  return out;
}

EigResult qrEigenvalues(CMatrix h, const EigOptions& options) {
  if (!h.square()) fail(ErrorKind::InvalidArgument, "qrEigenvalues: matrix must be square");
  const std::size_t n = h.rows();
  for (std::size_t i = 2; i < n; ++i)
    for (std::size_t j = 0; j + 1 < i; ++j)
      if (h(i, j) != cplx{})
        fail(ErrorKind::InvalidArgument, "qrEigenvalues: input is not upper Hessenberg");

  EigResult result;
  result.eigenvalues.reserve(n);
  if (n == 0) return result;
  const CMatrix original = options.skip_residuals ? CMatrix{} : h;
  const double hnorm = h.frobeniusNorm();
  const std::size_t max_sweeps = options.max_sweeps ? options.max_sweeps : 100 * n;

  std::size_t hi = n - 1;
  std::size_t its = 0;
  bool done = false;
  while (!done) {
    // Locate the top of the unreduced block ending at hi.
    std::size_t l = hi;
    while (l > 0) {
      double scale = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
      if (scale == 0.0) scale = hnorm;
      if (std::abs(h(l, l - 1)) <= options.tol * scale) {
        h(l, l - 1) = 0.0;
        break;
      }
      --l;
    }

    if (l == hi) {
      result.eigenvalues.push_back(h(hi, hi));
      its = 0;
      if (hi == 0) break;
      --hi;
      continue;
    }
    if (l + 1 == hi) {
      const auto [l1, l2] = eig2x2(h(l, l), h(l, hi), h(hi, l), h(hi, hi));
      result.eigenvalues.push_back(l1);
      result.eigenvalues.push_back(l2);
      its = 0;
      if (l == 0) break;
      hi = l - 1;
      continue;
    }

    if (result.iterations >= max_sweeps)
      fail(ErrorKind::ConvergenceFailure,
           "qrEigenvalues: no convergence after " + std::to_string(result.iterations) +
               " sweeps (" + std::to_string(result.eigenvalues.size()) + " of " +
               std::to_string(n) + " eigenvalues found)");
    ++result.iterations;
    ++its;

    cplx shift;
    if (its % 10 == 0) {
      // Exceptional shift to break cycles.
      shift = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1)) * cplx{1.0, 0.5};
    } else {
      shift = wilkinsonShift(h, hi);
    }

    cplx x = h(l, l) - shift;
    cplx y = h(l + 1, l);
    for (std::size_t k = l; k < hi; ++k) {
      if (k > l) {
        x = h(k, k - 1);
        y = h(k + 1, k - 1);
      }
      const Givens g = makeGivens(x, y);
      const cplx sc = std::conj(g.s);
      const std::size_t c0 = k > l ? k - 1 : l;
      cplx* rk = &h(k, 0);
      cplx* rk1 = &h(k + 1, 0);
      for (std::size_t j = c0; j <= hi; ++j) {
        const cplx a = rk[j];
        const cplx b = rk1[j];
        rk[j] = g.c * a + cmul(g.s, b);
        rk1[j] = g.c * b - cmul(sc, a);
      }
      if (k > l) h(k + 1, k - 1) = 0.0;
      const std::size_t r1 = std::min(k + 2, hi);
      for (std::size_t i = l; i <= r1; ++i) {
        cplx* row = &h(i, 0);
        const cplx a = row[k];
        const cplx b = row[k + 1];
        row[k] = g.c * a + cmul(sc, b);
        row[k + 1] = g.c * b - cmul(g.s, a);
      }
    }
  }

  attachResiduals(original, hnorm, options, result);
  return result;
}

EigResult eigenvalues(const CMatrix& a, const EigOptions& options) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "eigenvalues: matrix must be square");
  const bool lapack = options.backend == EigBackend::Lapack ||
                      (options.backend == EigBackend::Auto && a.rows() >= kLapackThreshold);
  if (!lapack) return qrEigenvalues(hessenbergReduce(a).h, options);
  return lapackEigenvalues(a, options);
}

std::vector<double> hessenbergResiduals(const CMatrix& h, const std::vector<cplx>& lambdas) {
  const std::size_t n = h.rows();
  std::vector<double> out;
  out.reserve(lambdas.size());
  if (n == 0) return out;
  const double hnorm = std::max(h.frobeniusNorm(), std::numeric_limits<double>::min());
  // Seeded Gaussian right-hand sides: broadband, so no singular vector is
  // systematically missed, and reproducible.
  constexpr int kTrials = 3;
  std::vector<std::vector<cplx>> rhs(kTrials, std::vector<cplx>(n));
  std::mt19937_64 gen(0x7e5f5ec);
  std::normal_distribution<double> normal;
  for (auto& r : rhs)
    for (auto& z : r) z = cplx{normal(gen), normal(gen)};

  CMatrix u(n, n);
  std::vector<cplx> b(n);
  std::vector<cplx> x(n);
  for (const cplx lambda : lambdas) {
    double best = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < kTrials && best > 1e-10 * hnorm; ++trial) {
      // Gaussian elimination with partial pivoting on the Hessenberg H - lambda.
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j0 = i > 0 ? i - 1 : 0;
        for (std::size_t j = 0; j < j0; ++j) u(i, j) = 0.0;
        for (std::size_t j = j0; j < n; ++j) u(i, j) = h(i, j);
        u(i, i) -= lambda;
      }
      b = rhs[std::size_t(trial)];
      const double tiny = kEps * hnorm;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(u(k + 1, k)) > std::abs(u(k, k))) {
          std::swap_ranges(&u(k, k), &u(k, 0) + n, &u(k + 1, k));
          std::swap(b[k], b[k + 1]);
        }
        if (std::abs(u(k, k)) < tiny) u(k, k) = tiny;
        const cplx m = u(k + 1, k) / u(k, k);
        u(k + 1, k) = 0.0;
        if (m == cplx{}) continue;
        cplx* dst = &u(k + 1, 0);
        const cplx* src = &u(k, 0);
        for (std::size_t j = k + 1; j < n; ++j) dst[j] -= cmul(m, src[j]);
        b[k + 1] -= cmul(m, b[k]);
      }
      if (std::abs(u(n - 1, n - 1)) < tiny) u(n - 1, n - 1) = tiny;
      for (std::size_t ii = n; ii-- > 0;) {
        cplx s = b[ii];
        const cplx* row = &u(ii, 0);
        for (std::size_t j = ii + 1; j < n; ++j) s -= cmul(row[j], x[j]);
        x[ii] = s / row[ii];
      }
      double xn = 0.0;
      for (const cplx& z : x) xn += std::norm(z);
      xn = std::sqrt(xn);
      double rn = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cplx s = -lambda * x[i];
        const std::size_t j0 = i > 0 ? i - 1 : 0;
        const cplx* row = &h(i, 0);
        for (std::size_t j = j0; j < n; ++j) s += cmul(row[j], x[j]);
        rn += std::norm(s);
      }
      best = std::min(best, xn > 0.0 ? std::sqrt(rn) / xn : hnorm);
    }
    out.push_back(best);
  }
  return out;
}

double singularMin(const CMatrix& a) {
  if (a.rows() == 0) return 0.0;
  const GolubKahan gk = golubKahan(a);
  return bisectSingular(gk, 0);
}

std::vector<double> singularValues(const CMatrix& a) {
  const GolubKahan gk = golubKahan(a);
  std::vector<double> s(gk.n);
  for (std::size_t k = 0; k < gk.n; ++k) s[k] = bisectSingular(gk, k);
  return s;
}

}  // namespace torspec
