#include "torspec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "torspec/asymptotics.hpp"
#include "torspec/model1d.hpp"
#include "torspec/report_io.hpp"
#include "torspec/spectral2d.hpp"

namespace torspec {

namespace fs = std::filesystem;

namespace {

using Params = std::vector<std::pair<std::string, std::string>>;

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string orientationTag(int o) { return o > 0 ? "pos" : "neg"; }

std::string caseName(const std::string& prefix, double h, double eps) {
  return prefix + "_h" + tag(h) + "_eps" + tag(eps);
}

std::string directionName(const std::string& prefix, double h, double eps,
                          const RationalDirection& d, int orientation) {
  return caseName(prefix, h, eps) + "_m" + std::to_string(d.m) + "_n" + std::to_string(d.n) + "_" +
         orientationTag(orientation) + ".txt";
}

std::string ensureOutputDir(const ExperimentConfig& config) {
  const std::string dir = resolveOutputDir(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

template <class Writer>
std::string writeFile(const std::string& dir, const std::string& name, Writer&& w) {
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot open '" + path + "' for writing");
  w(out);
  out.flush();
  if (!out) fail(ErrorKind::IoError, "write to '" + path + "' failed");
  return name;
}

std::string backendName(EigBackend b) {
  switch (b) {
    case EigBackend::InHouse: return "inhouse";
    case EigBackend::Lapack: return "lapack";
    default: return "auto";
  }
}

std::string joined(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt17(v[i]);
  return s;
}

std::string symbolDescription(const ExperimentConfig& c) {
  switch (c.symbol_source) {
    case SymbolSource::Generate:
      return "generate F=" + std::to_string(c.degree) + " kappa=" + fmt17(c.kappa) +
             " seed=" + std::to_string(c.seed.value_or(0));
    case SymbolSource::File: return "file " + c.symbol_file;
    case SymbolSource::Inline:
      return "inline F=" + std::to_string(c.degree) + " coefficients=" +
             std::to_string(c.inline_coefficients.size());
  }
  return "";
}

// The manifest keeps one section per stage, sorted by stage name, so reruns
// of any stage rewrite it deterministically.
void updateManifest(const std::string& dir, const std::string& stage, const Params& params,
                    const std::vector<std::string>& files) {
  const fs::path path = fs::path(dir) / "manifest.txt";
  std::map<std::string, std::vector<std::string>> sections;
  if (std::ifstream in(path); in) {
    std::string line, current;
    while (std::getline(in, line)) {
      if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
        current = line.substr(1, line.size() - 2);
        sections[current];
      } else if (!current.empty() && !line.empty()) {
        sections[current].push_back(line);
      }
    }
  }
  std::vector<std::string>& body = sections[stage];
  body.clear();
  body.push_back("version = " + std::string(kVersion));
  for (const auto& [k, v] : params) body.push_back(k + " = " + v);
  for (const auto& f : files) body.push_back("file = " + f);
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write manifest '" + path.string() + "'");
  out << "# torspec run manifest\n";
  for (const auto& [name, lines] : sections) {
    out << "[" << name << "]\n";
    for (const auto& l : lines) out << l << "\n";
  }
}

Params commonParams(const ExperimentConfig& c) {
  return {{"config", c.source}, {"symbol", symbolDescription(c)}};
}

std::vector<RationalDirection> directionsFor(const ExperimentConfig& c, const SymbolCoefficients& q) {
  if (!c.directions.empty()) return c.directions;
  return q.degree() >= 1 ? rationalDirections(q.degree()) : std::vector<RationalDirection>{};
}

std::string loadedFile(const std::string& dir, const std::string& name) {
  const std::string path = (fs::path(dir) / name).string();
  if (!fs::exists(path))
    fail(ErrorKind::MissingInput, "missing input '" + path + "'; run the producing stage first");
  return path;
}

}  // namespace

const std::vector<std::string>& stageNames() {
  static const std::vector<std::string> names{"gen-symbol", "classical", "spectrum2d", "predict",
                                              "compare",    "model1d",   "rescheck"};
  return names;
}

StageReport runGenSymbol(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const SymbolCoefficients q = resolveSymbol(config);
  StageReport r{"gen-symbol", {}, {}};
  r.files.push_back(writeFile(dir, "symbol.txt", [&](std::ostream& out) { writeSymbol(out, q); }));
  r.summary.push_back("symbol F=" + std::to_string(q.degree()) + " kappa=" + fmt17(q.kappa()) +
                      " l1_norm=" + fmt17(q.l1Norm()));
  updateManifest(dir, r.stage, commonParams(config), r.files);
  return r;
}

StageReport runClassical(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const SymbolCoefficients q = resolveSymbol(config);
  const double energy = config.classical_energy;
  const double radius = std::sqrt(energy);
  const auto dirs = q.degree() >= 1 ? rationalDirections(q.degree()) : std::vector<RationalDirection>{};
  const BandBounds band = bandBounds(q, energy, std::max(64, config.classical_samples));
  StageReport r{"classical", {}, {}};

  r.files.push_back(writeFile(dir, "classical_directions.txt", [&](std::ostream& out) {
    out << "# torspec classical directions v1\n";
    writeHeader(out, "energy", energy);
    writeHeader(out, "inf_band", band.inf_band);
    writeHeader(out, "sup_band", band.sup_band);
    writeHeader(out, "records", std::to_string(dirs.size()));
    writeColumns(out, {"m", "n", "torus_average", "q_inf", "q_sup", "t_min",
                       "second_derivative_at_min", "torus_min_q", "torus_max_q"});
    for (const auto& d : dirs) {
      const QInfinityInterval iv = qInfinityInterval(q, d, energy, false);
      writeRow(out, {double(d.m), double(d.n), iv.torus_average, iv.q_inf, iv.q_sup, iv.t_min,
                     iv.second_derivative_at_min, iv.torus_min_q, iv.torus_max_q});
    }
  }));

  r.files.push_back(writeFile(dir, "classical_segments.txt", [&](std::ostream& out) {
    out << "# torspec classical segments v1\n";
    writeHeader(out, "energy", energy);
    writeColumns(out, {"m", "n", "orientation", "angle", "q_inf", "q_sup"});
    for (const auto& d : dirs) {
      const auto [ux, uy] = d.unitCotangent();
      for (int o : {1, -1}) {
        const QInfinityInterval iv = qInfinityIntervalAt(q, d, o * radius * ux, o * radius * uy, false);
        double angle = std::atan2(o * uy, o * ux);
        if (angle < 0.0) angle += 2.0 * std::numbers::pi;
        writeRow(out, {double(d.m), double(d.n), double(o), angle, iv.q_inf, iv.q_sup});
      }
    }
  }));

  r.files.push_back(writeFile(dir, "classical_curve.txt", [&](std::ostream& out) {
    out << "# torspec classical curve v1\n";
    writeHeader(out, "energy", energy);
    writeHeader(out, "samples", std::to_string(config.classical_samples));
    writeHeader(out, "grid", std::to_string(config.curve_grid));
    writeColumns(out, {"angle", "torus_average", "torus_min_q", "torus_max_q"});
    for (int i = 0; i < config.classical_samples; ++i) {
      const double phi = 2.0 * std::numbers::pi * (i + 0.5) / config.classical_samples;
      const double xi = radius * std::cos(phi), eta = radius * std::sin(phi);
      const TorusExtrema ext = torusExtrema(q, xi, eta, config.curve_grid);
      writeRow(out, {phi, q.combined(0, 0, xi, eta).real(), ext.min, ext.max});
    }
  }));

  r.summary.push_back("directions=" + std::to_string(dirs.size()) + " band=[" +
                      fmt17(band.inf_band) + ", " + fmt17(band.sup_band) + "] average_range=[" +
                      fmt17(band.average_min) + ", " + fmt17(band.average_max) + "]");
  Params p = commonParams(config);
  p.push_back({"energy", fmt17(energy)});
  p.push_back({"samples", std::to_string(config.classical_samples)});
  p.push_back({"curve_grid", std::to_string(config.curve_grid)});
  updateManifest(dir, r.stage, p, r.files);
  return r;
}

StageReport runSpectrum(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const SymbolCoefficients q = resolveSymbol(config);
  StageReport r{"spectrum2d", {}, {}};
  EigOptions opts;
  opts.backend = config.backend;
  for (double h : config.h_values) {
    const ModeShell shell = buildModeShell(h, config.e1, config.e2);
    if (shell.size() > config.dimension_cap)
      fail(ErrorKind::DimensionCapExceeded,
           "mode shell for h = " + fmt17(h) + " has #E = " + std::to_string(shell.size()) +
               " modes, above the dimension cap " + std::to_string(config.dimension_cap));
    for (double eps : config.epsilonsFor(h)) {
      SpectrumRecord rec = computeSpectrum(assembleMatrix(q, shell, eps), opts);
      rec.meta.degree = q.degree();
      rec.meta.kappa = q.kappa();
      rec.meta.seed = q.seed();
      r.files.push_back(writeFile(dir, caseName("spectrum", h, eps) + ".txt",
                                  [&](std::ostream& out) { writeSpectrum(out, rec); }));
      r.summary.push_back("h=" + fmt17(h) + " eps=" + fmt17(eps) + " n=" +
                          std::to_string(shell.size()) + " residual=" + fmt17(rec.residual_bound) +
                          " trace_ok=" + (rec.trace_ok ? "true" : "false"));
    }
  }
  Params p = commonParams(config);
  p.push_back({"h", joined(config.h_values)});
  p.push_back({"E1", fmt17(config.e1)});
  p.push_back({"E2", fmt17(config.e2)});
  p.push_back({"backend", backendName(config.backend)});
  p.push_back({"dimension_cap", std::to_string(config.dimension_cap)});
  updateManifest(dir, r.stage, p, r.files);
  return r;
}

StageReport runPredict(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const SymbolCoefficients q = resolveSymbol(config);
  const double energy = config.predictionEnergy();
  StageReport r{"predict", {}, {}};
  for (double h : config.h_values)
    for (double eps : config.epsilonsFor(h)) {
      if (!(eps > 0.0)) {
        r.summary.push_back("h=" + fmt17(h) + " eps=0 skipped: no leg at eps = 0");
        continue;
      }
      for (const auto& d : directionsFor(config, q))
        for (int o : {1, -1}) {
          LatticePrediction p;
          try {
            p = predictLattice(q, d, energy, h, eps, config.j_range, config.k_max, o);
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::DegenerateMinimum) throw;
            r.summary.push_back("h=" + fmt17(h) + " eps=" + fmt17(eps) + " direction (" +
                                std::to_string(d.m) + "," + std::to_string(d.n) + ") " +
                                orientationTag(o) + " skipped: " + e.what());
            continue;
          }
          r.files.push_back(writeFile(dir, directionName("prediction", h, eps, d, o),
                                      [&](std::ostream& out) { writePrediction(out, p); }));
          if (!p.in_window) r.summary.push_back("note: " + p.window_note);
        }
    }
  r.summary.push_back("predictions=" + std::to_string(r.files.size()));
  Params p = commonParams(config);
  p.push_back({"energy", fmt17(energy)});
  p.push_back({"k_max", std::to_string(config.k_max)});
  p.push_back({"j_range", std::to_string(config.j_range)});
  updateManifest(dir, r.stage, p, r.files);
  return r;
}

StageReport runCompare(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const SymbolCoefficients q = resolveSymbol(config);
  StageReport r{"compare", {}, {}};
  struct Row {
    double h, eps;
    RationalDirection d;
    int o;
    MatchReport m;
    std::size_t in_region;
  };
  std::vector<Row> rows;
  for (double h : config.h_values)
    for (double eps : config.epsilonsFor(h)) {
      if (!(eps > 0.0)) continue;
      const SpectrumRecord spec = loadSpectrum(loadedFile(dir, caseName("spectrum", h, eps) + ".txt"));
      for (const auto& d : directionsFor(config, q))
        for (int o : {1, -1}) {
          const std::string pname = directionName("prediction", h, eps, d, o);
          if (!fs::exists(fs::path(dir) / pname)) continue;
          std::ifstream pin(loadedFile(dir, pname));
          const LatticePrediction pred = readPrediction(pin);
          // Theorem window around the leg: |Re z - a| < h/(C0 sqrt eps),
          // Im z / eps <= q_inf + C0 h / sqrt eps.
          const double centre = std::pow(pred.xi2_values[pred.xi2_values.size() / 2], 2);
          const double re_half = h / (config.c0 * std::sqrt(eps));
          const double im_top = pred.q_inf + config.c0 * h / std::sqrt(eps);
          auto inside = [&](cplx z) {
            return std::abs(z.real() - centre) < re_half && z.imag() / eps <= im_top;
          };
          std::vector<cplx> pv, cv;
          for (const cplx& z : pred.values())
            if (inside(z)) pv.push_back(z);
          for (const cplx& z : spec.eigenvalues)
            if (inside(z)) cv.push_back(z);
          MatchReport m;
          if (!pv.empty() && !cv.empty()) {
            m = matchSpectra(pv, cv, h, eps);
          } else {
            m.unmatched_predicted = pv.size();
            m.unmatched_computed = cv.size();
          }
          r.files.push_back(writeFile(dir, directionName("match", h, eps, d, o), [&](std::ostream& out) {
            writeMatchReport(out, m, h, eps);
          }));
          if (m.pairs.empty())
            r.summary.push_back("h=" + fmt17(h) + " eps=" + fmt17(eps) + " direction (" +
                                std::to_string(d.m) + "," + std::to_string(d.n) + ") " +
                                orientationTag(o) + ": zero matchable points");
          rows.push_back({h, eps, d, o, m, cv.size()});
        }
    }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.d, a.o, a.eps, a.h) < std::tie(b.d, b.o, b.eps, b.h);
  });
  r.files.push_back(writeFile(dir, "compare_summary.txt", [&](std::ostream& out) {
    out << "# torspec compare summary v1\n";
    writeHeader(out, "c0", config.c0);
    writeColumns(out, {"h", "epsilon", "eps_over_h", "m", "n", "orientation", "computed_in_window",
                       "matched", "unmatched_predicted", "unmatched_computed",
                       "rms_rescaled_error"});
    for (const Row& w : rows)
      writeRow(out, {w.h, w.eps, w.eps / w.h, double(w.d.m), double(w.d.n), double(w.o),
                     double(w.in_region), double(w.m.pairs.size()), double(w.m.unmatched_predicted),
                     double(w.m.unmatched_computed), w.m.rms_rescaled_error});
  }));
  // rms trend across h at fixed eps/h for every direction and orientation.
  std::map<std::tuple<int, int, int, std::string>, std::vector<std::pair<double, double>>> trend;
  for (const Row& w : rows)
    if (!w.m.pairs.empty())
      trend[{w.d.m, w.d.n, w.o, tag(w.eps / w.h)}].push_back({w.h, w.m.rms_rescaled_error});
  for (auto& [key, pts] : trend) {
    if (pts.size() < 2) continue;
    std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a.first > b.first; });
    std::string line = "trend (" + std::to_string(std::get<0>(key)) + "," +
                       std::to_string(std::get<1>(key)) + ") " + orientationTag(std::get<2>(key)) +
                       " eps/h=" + std::get<3>(key) + ":";
    bool decreasing = true;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      line += " h=" + tag(pts[i].first) + " rms=" + tag(pts[i].second);
      if (i && pts[i].second >= pts[i - 1].second) decreasing = false;
    }
    r.summary.push_back(line + (decreasing ? " (decreasing)" : " (not decreasing)"));
  }
  r.summary.push_back("match reports=" + std::to_string(rows.size()));
  Params p = commonParams(config);
  p.push_back({"h", joined(config.h_values)});
  p.push_back({"c0", fmt17(config.c0)});
  updateManifest(dir, r.stage, p, r.files);
  return r;
}

StageReport runModel1d(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const Model1DSettings& s = config.model1d;
  Model1D m;
  m.h = s.h;
  m.epsilon = s.epsilon;
  m.theta = s.theta;
  m.potential = oneMinusCosine(s.amplitude);
  EigOptions opts;
  opts.backend = config.backend;
  const auto z = lowLyingSpectrum(m, static_cast<std::size_t>(s.count), opts);
  const PotentialExtrema ext = potentialExtrema(m.potential);
  const auto ladder = harmonicLadder(ext.second_derivative_at_min, 2.0, s.count - 1);
  const double scale = std::sqrt(s.epsilon) * s.h;
  StageReport r{"model1d", {}, {}};
  double worst = 0.0;
  r.files.push_back(writeFile(dir, "model1d_spectrum.txt", [&](std::ostream& out) {
    out << "# torspec model1d spectrum v1\n";
    writeHeader(out, "h", s.h);
    writeHeader(out, "epsilon", s.epsilon);
    writeHeader(out, "theta", s.theta);
    writeHeader(out, "amplitude", s.amplitude);
    writeHeader(out, "min_V", ext.min);
    writeHeader(out, "second_derivative_V", ext.second_derivative_at_min);
    writeColumns(out, {"k", "re", "im", "harmonic_re", "harmonic_im", "error_over_h2"});
    for (std::size_t k = 0; k < z.size(); ++k) {
      const cplx pred = cplx{0.0, s.epsilon * ext.min} + scale * ladder[k];
      const double err = std::abs(z[k] - pred) / (s.h * s.h);
      worst = std::max(worst, err);
      writeRow(out, {double(k), z[k].real(), z[k].imag(), pred.real(), pred.imag(), err});
    }
  }));
  r.summary.push_back("eigenvalues=" + std::to_string(z.size()) + " max |z - harmonic| / h^2 = " +
                      fmt17(worst));
  Params p{{"config", config.source}};
  p.push_back({"h", fmt17(s.h)});
  p.push_back({"epsilon", fmt17(s.epsilon)});
  p.push_back({"amplitude", fmt17(s.amplitude)});
  p.push_back({"theta", fmt17(s.theta)});
  p.push_back({"count", std::to_string(s.count)});
  updateManifest(dir, r.stage, p, r.files);
  return r;
}

StageReport runResCheck(const ExperimentConfig& config) {
  const std::string dir = ensureOutputDir(config);
  const ResCheckSettings& s = config.rescheck;
  StageReport r{"rescheck", {}, {}};
  std::vector<double> fitted;
  for (double h : s.h_values)
    for (const ScaledValue& ev : s.epsilon) {
      const double eps = ev.resolve(h);
      if (!(eps > 0.0)) fail(ErrorKind::ConfigError, "rescheck needs epsilon > 0");
      const double ht = h / std::sqrt(eps);
      ZRegion region;
      region.c_cutoff = s.c_cutoff;
      region.c_im = s.c_im;
      region.smallness = s.smallness;
      region.n_re = s.n_re;
      region.im_values.clear();
      double im_max = 0.0;
      for (double v : s.im_over_h_tilde) {
        region.im_values.push_back(v * ht);
        im_max = std::max(im_max, std::abs(v * ht));
      }
      region.re_min = s.re_min_over_h_tilde * ht;
      if (s.re_max) {
        region.re_max = *s.re_max;
      } else {
        const double zmax = std::pow(s.smallness / ht, 2) * (1.0 - 1e-12);
        region.re_max = std::sqrt(std::max(0.0, zmax * zmax - im_max * im_max));
      }
      if (!(region.re_min <= region.re_max))
        fail(ErrorKind::RegionViolatesHypotheses,
             "empty Re z range [" + fmt17(region.re_min) + ", " + fmt17(region.re_max) +
                 "] for h = " + fmt17(h));
      Model1D m;
      m.h = h;
      m.epsilon = eps;
      m.potential = oneMinusCosine(s.amplitude);
      const ResolventProbe probe = resolventBoundScan(m, region);
      fitted.push_back(probe.fitted_c);
      r.files.push_back(writeFile(dir, caseName("rescheck", h, eps) + ".txt",
                                  [&](std::ostream& out) { writeProbe(out, probe); }));
      r.summary.push_back("h=" + fmt17(h) + " eps=" + fmt17(eps) + " h_tilde=" + fmt17(ht) +
                          " Re z in [" + fmt17(region.re_min) + ", " + fmt17(region.re_max) +
                          "] fitted_c=" + fmt17(probe.fitted_c));
    }
  for (std::size_t i = 1; i < fitted.size(); ++i)
    r.summary.push_back("fitted_c ratio " + std::to_string(i) + "/" + std::to_string(i - 1) + " = " +
                        fmt17(fitted[i] / fitted[i - 1]));
  Params p{{"config", config.source}};
  p.push_back({"h", joined(s.h_values)});
  p.push_back({"amplitude", fmt17(s.amplitude)});
  p.push_back({"smallness", fmt17(s.smallness)});
  updateManifest(dir, r.stage, p, r.files);
  return r;
}

StageReport runStage(const ExperimentConfig& config, const std::string& stage) {
  if (stage == "gen-symbol") return runGenSymbol(config);
  if (stage == "classical") return runClassical(config);
  if (stage == "spectrum2d") return runSpectrum(config);
  if (stage == "predict") return runPredict(config);
  if (stage == "compare") return runCompare(config);
  if (stage == "model1d") return runModel1d(config);
  if (stage == "rescheck") return runResCheck(config);
  if (stage == "all") {
    StageReport all{"all", {}, {}};
    for (const std::string& s : stageNames()) {
      StageReport one = runStage(config, s);
      all.files.insert(all.files.end(), one.files.begin(), one.files.end());
      for (const auto& line : one.summary) all.summary.push_back(s + ": " + line);
    }
    return all;
  }
  fail(ErrorKind::InvalidArgument, "unknown stage '" + stage + "'");
}

int exitCodeFor(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::DimensionCapExceeded:
    case ErrorKind::DegenerateMinimum:
      return 3;
    default:
      return 2;
  }
}

}  // namespace torspec
