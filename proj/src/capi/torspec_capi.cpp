#include "torspec/torspec.h"

#include <new>
#include <sstream>
#include <string>

#include "torspec/model1d.hpp"
#include "torspec/pipeline.hpp"
#include "torspec/spectral2d.hpp"

using namespace torspec;

struct tsp_config {
  ExperimentConfig config;
};

struct tsp_symbol {
  SymbolCoefficients q;
};

struct tsp_spectrum {
  SpectrumRecord record;
};

struct tsp_report {
  StageReport report;
};

namespace {

thread_local std::string last_error;

template <class F>
tsp_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return TSP_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<tsp_status>(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return TSP_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* tsp_version(void) { return kVersion; }

const char* tsp_last_error(void) { return last_error.c_str(); }

const char* tsp_status_name(tsp_status status) {
  if (status == TSP_OK) return "ok";
  if (status == TSP_ERR_INTERNAL) return "internal";
  if (status >= 1 && status <= 10) return errorKindName(static_cast<ErrorKind>(status));
  return "unknown";
}

int tsp_exit_code(tsp_status status) {
  if (status == TSP_OK) return 0;
  if (status >= 1 && status <= 10) return exitCodeFor(static_cast<ErrorKind>(status));
  return 3;
}

tsp_status tsp_config_load(const char* path, tsp_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tsp_config{loadConfig(path)};
  });
}

tsp_status tsp_config_parse(const char* text, const char* source_name, tsp_config** out) {
  return guarded([&] {
    need(text, "text");
    need(out, "out");
    std::istringstream in(text);
    *out = new tsp_config{parseConfig(in, source_name ? source_name : "<string>")};
  });
}

tsp_status tsp_config_set_output(tsp_config* config, const char* output_dir) {
  return guarded([&] {
    need(config, "config");
    need(output_dir, "output_dir");
    config->config.output_dir = output_dir;
  });
}

void tsp_config_free(tsp_config* config) { delete config; }

tsp_status tsp_run_stage(const tsp_config* config, const char* stage, tsp_report** out) {
  return guarded([&] {
    need(config, "config");
    need(stage, "stage");
    need(out, "out");
    *out = new tsp_report{runStage(config->config, stage)};
  });
}

size_t tsp_report_file_count(const tsp_report* report) {
  return report ? report->report.files.size() : 0;
}

const char* tsp_report_file(const tsp_report* report, size_t index) {
  if (!report || index >= report->report.files.size()) return nullptr;
  return report->report.files[index].c_str();
}

size_t tsp_report_line_count(const tsp_report* report) {
  return report ? report->report.summary.size() : 0;
}

const char* tsp_report_line(const tsp_report* report, size_t index) {
  if (!report || index >= report->report.summary.size()) return nullptr;
  return report->report.summary[index].c_str();
}

void tsp_report_free(tsp_report* report) { delete report; }

tsp_status tsp_symbol_generate(int degree, double kappa, uint64_t seed, tsp_symbol** out) {
  return guarded([&] {
    need(out, "out");
    *out = new tsp_symbol{generateRandomSymbol(degree, kappa, seed)};
  });
}

tsp_status tsp_symbol_zero(int degree, double kappa, tsp_symbol** out) {
  return guarded([&] {
    need(out, "out");
    *out = new tsp_symbol{SymbolCoefficients(degree, kappa)};
  });
}

tsp_status tsp_symbol_set(tsp_symbol* symbol, int ell, int j, int k, double re, double im) {
  return guarded([&] {
    need(symbol, "symbol");
    symbol->q = symbol->q.withCoefficient(ell, j, k, {re, im});
  });
}

tsp_status tsp_symbol_coeff(const tsp_symbol* symbol, int ell, int j, int k, double* re,
                            double* im) {
  return guarded([&] {
    need(symbol, "symbol");
    need(re, "re");
    need(im, "im");
    if (ell < 0 || ell > 2) fail(ErrorKind::InvalidArgument, "ell must lie in 0..2");
    const cplx c = symbol->q.coeff(ell, j, k);
    *re = c.real();
    *im = c.imag();
  });
}

tsp_status tsp_symbol_evaluate(const tsp_symbol* symbol, double x, double y, double xi, double eta,
                               double* value) {
  return guarded([&] {
    need(symbol, "symbol");
    need(value, "value");
    *value = evaluateSymbol(symbol->q, PhasePoint::make(x, y, xi, eta));
  });
}

tsp_status tsp_symbol_load(const char* path, tsp_symbol** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new tsp_symbol{loadSymbol(path)};
  });
}

tsp_status tsp_symbol_save(const tsp_symbol* symbol, const char* path) {
  return guarded([&] {
    need(symbol, "symbol");
    need(path, "path");
    saveSymbol(path, symbol->q);
  });
}

void tsp_symbol_free(tsp_symbol* symbol) { delete symbol; }

tsp_status tsp_q_infinity(const tsp_symbol* symbol, int m, int n, double energy, double* q_inf,
                          double* q_sup) {
  return guarded([&] {
    need(symbol, "symbol");
    need(q_inf, "q_inf");
    need(q_sup, "q_sup");
    const QInfinityInterval iv = qInfinityInterval(symbol->q, RationalDirection::make(m, n), energy, false);
    *q_inf = iv.q_inf;
    *q_sup = iv.q_sup;
  });
}

tsp_status tsp_shell_size(double h, double e1, double e2, size_t* count) {
  return guarded([&] {
    need(count, "count");
    *count = buildModeShell(h, e1, e2).size();
  });
}

tsp_status tsp_spectrum_compute(const tsp_symbol* symbol, double h, double e1, double e2,
                                double epsilon, tsp_spectrum** out) {
  return guarded([&] {
    need(symbol, "symbol");
    need(out, "out");
    SpectrumRecord rec = computeSpectrum(assembleMatrix(symbol->q, buildModeShell(h, e1, e2), epsilon));
    rec.meta.degree = symbol->q.degree();
    rec.meta.kappa = symbol->q.kappa();
    rec.meta.seed = symbol->q.seed();
    *out = new tsp_spectrum{std::move(rec)};
  });
}

size_t tsp_spectrum_size(const tsp_spectrum* spectrum) {
  return spectrum ? spectrum->record.eigenvalues.size() : 0;
}

size_t tsp_spectrum_eigenvalues(const tsp_spectrum* spectrum, double* re_im, size_t capacity) {
  if (!spectrum || !re_im) return 0;
  const auto& z = spectrum->record.eigenvalues;
  const size_t n = capacity < z.size() ? capacity : z.size();
  for (size_t i = 0; i < n; ++i) {
    re_im[2 * i] = z[i].real();
    re_im[2 * i + 1] = z[i].imag();
  }
  return n;
}

double tsp_spectrum_residual(const tsp_spectrum* spectrum) {
  return spectrum ? spectrum->record.residual_bound : 0.0;
}

int tsp_spectrum_trace_ok(const tsp_spectrum* spectrum) {
  return spectrum && spectrum->record.trace_ok ? 1 : 0;
}

tsp_status tsp_spectrum_save(const tsp_spectrum* spectrum, const char* path) {
  return guarded([&] {
    need(spectrum, "spectrum");
    need(path, "path");
    saveSpectrum(path, spectrum->record);
  });
}

void tsp_spectrum_free(tsp_spectrum* spectrum) { delete spectrum; }

tsp_status tsp_model1d_ladder(double h, double epsilon, double amplitude, size_t count,
                              double* re_im) {
  return guarded([&] {
    need(re_im, "re_im");
    Model1D m;
    m.h = h;
    m.epsilon = epsilon;
    m.potential = oneMinusCosine(amplitude);
    const auto z = lowLyingSpectrum(m, count);
    if (z.size() < count) fail(ErrorKind::InvalidArgument, "count exceeds the truncation dimension");
    for (size_t i = 0; i < count; ++i) {
      re_im[2 * i] = z[i].real();
      re_im[2 * i + 1] = z[i].imag();
    }
  });
}

}  // extern "C"
