#ifndef TORSPEC_TORSPEC_H
#define TORSPEC_TORSPEC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TORSPEC_BUILDING_CAPI)
#define TSP_API __declspec(dllexport)
#else
#define TSP_API __declspec(dllimport)
#endif
#else
#define TSP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; values 1..10 mirror torspec::ErrorKind. */
typedef enum tsp_status {
  TSP_OK = 0,
  TSP_ERR_INVALID_ARGUMENT = 1,
  TSP_ERR_DEGENERATE_MINIMUM = 2,
  TSP_ERR_EMPTY_SHELL = 3,
  TSP_ERR_CONVERGENCE_FAILURE = 4,
  TSP_ERR_TRUNCATION_TOO_SMALL = 5,
  TSP_ERR_REGION_VIOLATES_HYPOTHESES = 6,
  TSP_ERR_DIMENSION_CAP_EXCEEDED = 7,
  TSP_ERR_CONFIG = 8,
  TSP_ERR_IO = 9,
  TSP_ERR_MISSING_INPUT = 10,
  TSP_ERR_INTERNAL = 99
} tsp_status;

typedef struct tsp_config tsp_config;
typedef struct tsp_symbol tsp_symbol;
typedef struct tsp_spectrum tsp_spectrum;
typedef struct tsp_report tsp_report;

TSP_API const char* tsp_version(void);
/* Message of the last failure on the calling thread; empty after success. */
TSP_API const char* tsp_last_error(void);
TSP_API const char* tsp_status_name(tsp_status status);
/* Process exit code for a status: 0 success, 2 configuration or input, 3 numerical. */
TSP_API int tsp_exit_code(tsp_status status);

/* Configuration and pipeline stages. */
TSP_API tsp_status tsp_config_load(const char* path, tsp_config** out);
TSP_API tsp_status tsp_config_parse(const char* text, const char* source_name, tsp_config** out);
TSP_API tsp_status tsp_config_set_output(tsp_config* config, const char* output_dir);
TSP_API void tsp_config_free(tsp_config* config);

/* Stage names: gen-symbol, classical, spectrum2d, predict, compare, model1d, rescheck, all. */
TSP_API tsp_status tsp_run_stage(const tsp_config* config, const char* stage, tsp_report** out);
TSP_API size_t tsp_report_file_count(const tsp_report* report);
TSP_API const char* tsp_report_file(const tsp_report* report, size_t index);
TSP_API size_t tsp_report_line_count(const tsp_report* report);
TSP_API const char* tsp_report_line(const tsp_report* report, size_t index);
TSP_API void tsp_report_free(tsp_report* report);

/* Symbols q = q0 + q1 xi + q2 eta. */
TSP_API tsp_status tsp_symbol_generate(int degree, double kappa, uint64_t seed, tsp_symbol** out);
TSP_API tsp_status tsp_symbol_zero(int degree, double kappa, tsp_symbol** out);
/* Sets q^_ell(j, k) and its Hermitian partner. */
TSP_API tsp_status tsp_symbol_set(tsp_symbol* symbol, int ell, int j, int k, double re, double im);
TSP_API tsp_status tsp_symbol_coeff(const tsp_symbol* symbol, int ell, int j, int k, double* re,
                                    double* im);
TSP_API tsp_status tsp_symbol_evaluate(const tsp_symbol* symbol, double x, double y, double xi,
                                       double eta, double* value);
TSP_API tsp_status tsp_symbol_load(const char* path, tsp_symbol** out);
TSP_API tsp_status tsp_symbol_save(const tsp_symbol* symbol, const char* path);
TSP_API void tsp_symbol_free(tsp_symbol* symbol);

/* Classical invariants on the torus of direction (m, n) at the given energy. */
TSP_API tsp_status tsp_q_infinity(const tsp_symbol* symbol, int m, int n, double energy,
                                  double* q_inf, double* q_sup);

/* Mode shell and spectra of -h^2 Lap + i eps q on the shell. */
TSP_API tsp_status tsp_shell_size(double h, double e1, double e2, size_t* count);
TSP_API tsp_status tsp_spectrum_compute(const tsp_symbol* symbol, double h, double e1, double e2,
                                        double epsilon, tsp_spectrum** out);
TSP_API size_t tsp_spectrum_size(const tsp_spectrum* spectrum);
/* Copies min(capacity, size) eigenvalues as interleaved (re, im) pairs. */
TSP_API size_t tsp_spectrum_eigenvalues(const tsp_spectrum* spectrum, double* re_im, size_t capacity);
TSP_API double tsp_spectrum_residual(const tsp_spectrum* spectrum);
TSP_API int tsp_spectrum_trace_ok(const tsp_spectrum* spectrum);
TSP_API tsp_status tsp_spectrum_save(const tsp_spectrum* spectrum, const char* path);
TSP_API void tsp_spectrum_free(tsp_spectrum* spectrum);

/* Low-lying eigenvalues of (hD)^2 + i eps a (1 - cos x), interleaved (re, im). */
TSP_API tsp_status tsp_model1d_ladder(double h, double epsilon, double amplitude, size_t count,
                                      double* re_im);

#ifdef __cplusplus
}
#endif

#endif
