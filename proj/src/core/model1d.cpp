#include "torspec/model1d.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "torspec/classical.hpp"
#include "torspec/error.hpp"
#include "torspec/report_io.hpp"

namespace torspec {

namespace {

SecularPolynomial asPolynomial(const std::map<int, cplx>& v) {
  int order = 0;
  for (const auto& [nu, c] : v) order = std::max(order, std::abs(nu));
  std::vector<cplx> centered(static_cast<std::size_t>(2 * order + 1));
  for (const auto& [nu, c] : v) centered[static_cast<std::size_t>(nu + order)] = c;
  return SecularPolynomial(std::move(centered));
}

double frequency(const Model1D& m, int j) { return m.h * (double(j) + m.theta); }

void checkPotential(const std::map<int, cplx>& v) {
  for (const auto& [nu, c] : v) {
    const auto it = v.find(-nu);
    const cplx partner = it == v.end() ? cplx{} : it->second;
    if (std::abs(partner - std::conj(c)) > 1e-14 * std::max(1.0, std::abs(c)))
      fail(ErrorKind::InvalidArgument,
           "potential is not real: V^(" + std::to_string(-nu) + ") != conj V^(" +
               std::to_string(nu) + ")");
  }
}

}  // namespace

std::map<int, cplx> oneMinusCosine(double amplitude) {
  return {{-1, -0.5 * amplitude}, {0, amplitude}, {1, -0.5 * amplitude}};
}

double potentialValue(const std::map<int, cplx>& v, double x) {
  cplx s = 0.0;
  for (const auto& [nu, c] : v) s += c * std::polar(1.0, nu * x);
  return s.real();
}

PotentialExtrema potentialExtrema(const std::map<int, cplx>& v) {
  const SecularPolynomial p = asPolynomial(v);
  const TExtrema ext = secularExtrema(p);
  PotentialExtrema out;
  out.min = ext.min;
  out.x_min = ext.t_min;
  out.max = ext.max;
  out.second_derivative_at_min = p.constant() ? 0.0 : p.secondDerivative(ext.t_min);
  out.repeated_minimum = ext.repeated_minimum || p.constant();
  return out;
}

int jMaxRule(const Model1D& model) {
  const double vmax = model.potential.empty() ? 0.0 : std::max(0.0, potentialExtrema(model.potential).max);
  const double need = 10.0 * (model.target_abs_z + model.epsilon * vmax);
  const int j = static_cast<int>(std::ceil(std::sqrt(need) / model.h + model.theta));
  return std::max(j, 1);
}

int validateModel(const Model1D& model) {
  if (!(model.h > 0.0)) fail(ErrorKind::InvalidArgument, "h must be positive");
  if (!(model.epsilon >= 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be nonnegative");
  if (!(model.theta >= 0.0 && model.theta < 1.0))
    fail(ErrorKind::InvalidArgument, "Floquet shift theta must lie in [0, 1)");
  checkPotential(model.potential);
  if (model.mixed && !model.mixed->phi)
    fail(ErrorKind::InvalidArgument, "mixed term needs a cutoff function phi");
  const int jmax = model.j_max > 0 ? model.j_max : jMaxRule(model);
  if (model.g) {
    if (!model.g->value || !model.g->derivative)
      fail(ErrorKind::InvalidArgument, "multiplier g needs value and derivative");
    for (int j = -jmax; j <= jmax; ++j) {
      const double xi = frequency(model, j);
      if (model.g->value(xi) < 1.0)
        fail(ErrorKind::InvalidArgument, "multiplier g drops below 1 at xi = " + std::to_string(xi));
      if (std::abs(xi * model.g->derivative(xi)) > 0.1)
        fail(ErrorKind::InvalidArgument, "|xi g'(xi)| exceeds 0.1 at xi = " + std::to_string(xi));
    }
  }
  const double vmax = model.potential.empty() ? 0.0 : std::max(0.0, potentialExtrema(model.potential).max);
  const double edge = model.h * (double(jmax) - model.theta);
  if (edge * edge < 10.0 * (model.target_abs_z + model.epsilon * vmax))
    fail(ErrorKind::TruncationTooSmall,
         "J_max = " + std::to_string(jmax) + " violates tail ellipticity; need J_max >= " +
             std::to_string(jMaxRule(model)));
  return jmax;
}

CMatrix assemble1D(const Model1D& model) {
  const int jmax = validateModel(model);
  const std::size_t n = static_cast<std::size_t>(2 * jmax + 1);
  CMatrix a(n, n);
  const cplx ie{0.0, model.epsilon};
  for (int c = -jmax; c <= jmax; ++c) {
    const std::size_t col = static_cast<std::size_t>(c + jmax);
    const double xi = frequency(model, c);
    const double g = model.g ? model.g->value(xi) : 1.0;
    a(col, col) = g * xi * xi;
    for (const auto& [nu, v] : model.potential) {
      const int r = c + nu;
      if (r < -jmax || r > jmax) continue;
      a(static_cast<std::size_t>(r + jmax), col) += ie * v;
    }
    if (model.mixed) {
      const double cutoff = model.mixed->phi(xi / std::pow(model.epsilon, model.mixed->delta));
      for (const auto& [key, coef] : model.mixed->coeffs) {
        const auto [nu, d] = key;
        const int r = c + nu;
        if (r < -jmax || r > jmax) continue;
        a(static_cast<std::size_t>(r + jmax), col) += ie * coef * std::pow(xi, d) * cutoff;
      }
    }
  }
  return a;
}

std::vector<cplx> lowLyingSpectrum(const Model1D& model, std::size_t count,
                                   const EigOptions& options) {
  const PotentialExtrema ext = potentialExtrema(model.potential);
  if (ext.repeated_minimum || ext.second_derivative_at_min < 1e-9)
    fail(ErrorKind::DegenerateMinimum, "potential has no unique nondegenerate minimum");
  const CMatrix a = assemble1D(model);
  std::vector<cplx> z = eigenvalues(a, options).eigenvalues;
  const cplx centre{0.0, model.epsilon * ext.min};
  std::sort(z.begin(), z.end(), [&](cplx u, cplx v) {
    const double du = std::abs(u - centre);
    const double dv = std::abs(v - centre);
    if (du != dv) return du < dv;
    return std::arg(u - centre) < std::arg(v - centre);
  });
  if (count < z.size()) z.resize(count);
  return z;
}

double smallestSingularValue(const CMatrix& a, cplx z) {
  if (!a.square()) fail(ErrorKind::InvalidArgument, "smallestSingularValue: matrix must be square");
  CMatrix s = a;
  for (std::size_t i = 0; i < s.rows(); ++i) s(i, i) -= z;
  return singularMin(s);
}

double fittedConstant(const ResolventProbe& probe, double c_cutoff) {
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probe.z_grid.size(); ++i)
    if (std::abs(probe.z_grid[i]) >= c_cutoff * probe.h_tilde)
      c = std::min(c, probe.sigma_min[i] / probe.bound_value[i]);
  return c;
}

ResolventProbe resolventBoundScan(const Model1D& model, const ZRegion& region) {
  if (!(model.epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "resolvent scan needs epsilon > 0");
  if (region.n_re < 1 || !(region.re_min <= region.re_max) || region.im_values.empty())
    fail(ErrorKind::InvalidArgument, "empty z region");
  ResolventProbe p;
  p.h = model.h;
  p.epsilon = model.epsilon;
  p.h_tilde = model.h / std::sqrt(model.epsilon);
  const double ht = p.h_tilde;
  double zmax = 0.0;
  for (int i = 0; i < region.n_re; ++i) {
    const double re = region.n_re == 1 ? region.re_min
                                       : region.re_min + (region.re_max - region.re_min) * i /
                                                             double(region.n_re - 1);
    for (double im : region.im_values) {
      const cplx z{re, im};
      const double az = std::abs(z);
      if (az < region.c_cutoff * ht)
        fail(ErrorKind::RegionViolatesHypotheses,
             "|z| = " + std::to_string(az) + " is below C h~ = " + std::to_string(region.c_cutoff * ht));
      if (std::abs(im) > region.c_im * ht)
        fail(ErrorKind::RegionViolatesHypotheses,
             "|Im z| = " + std::to_string(std::abs(im)) + " exceeds C1 h~ = " +
                 std::to_string(region.c_im * ht));
      if (ht * std::sqrt(az) > region.smallness)
        fail(ErrorKind::RegionViolatesHypotheses,
             "h~ |z|^{1/2} = " + std::to_string(ht * std::sqrt(az)) + " exceeds " +
                 std::to_string(region.smallness));
      p.z_grid.push_back(z);
      zmax = std::max(zmax, az);
    }
  }
  Model1D scaled = model;
  scaled.target_abs_z = std::max(model.target_abs_z, model.epsilon * zmax);
  CMatrix a = assemble1D(scaled);
  for (auto& v : a.data()) v /= model.epsilon;
  for (const cplx& z : p.z_grid) {
    p.sigma_min.push_back(smallestSingularValue(a, z));
    p.bound_value.push_back(std::pow(ht, 2.0 / 3.0) * std::cbrt(std::abs(z)));
  }
  p.fitted_c = fittedConstant(p, region.c_cutoff);
  return p;
}

void writeProbe(std::ostream& out, const ResolventProbe& p) {
  out << "# torspec resolvent probe v1\n";
  writeHeader(out, "h", p.h);
  writeHeader(out, "epsilon", p.epsilon);
  writeHeader(out, "h_tilde", p.h_tilde);
  writeHeader(out, "fitted_c", p.fitted_c);
  writeColumns(out, {"re_z", "im_z", "sigma_min", "bound_value"});
  for (std::size_t i = 0; i < p.z_grid.size(); ++i)
    writeRow(out, {p.z_grid[i].real(), p.z_grid[i].imag(), p.sigma_min[i], p.bound_value[i]});
}

ResolventProbe readProbe(std::istream& in) {
  const DelimitedTable t = readDelimited(in);
  ResolventProbe p;
  p.h = t.headerDouble("h");
  p.epsilon = t.headerDouble("epsilon");
  p.h_tilde = t.headerDouble("h_tilde");
  p.fitted_c = t.headerDouble("fitted_c");
  const std::size_t re = t.column("re_z"), im = t.column("im_z"), s = t.column("sigma_min"),
                    b = t.column("bound_value");
  for (const auto& row : t.rows) {
    p.z_grid.emplace_back(row[re], row[im]);
    p.sigma_min.push_back(row[s]);
    p.bound_value.push_back(row[b]);
  }
  return p;
}

}  // namespace torspec
