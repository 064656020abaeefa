#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "torspec/classical.hpp"
#include "torspec/dense_eig.hpp"
#include "torspec/error.hpp"
#include "torspec/symbol.hpp"

namespace torspec {

inline constexpr const char* kVersion = "1.0.0";

/// Environment variable naming the root for relative output directories.
inline constexpr const char* kOutputRootVariable = "TORSPEC_OUTPUT_ROOT";

struct ConfigEntry {
  std::string value;
  int line = 0;
};

/// `[section]` headers, `key = value` lines, '#' comments. Keys may repeat;
/// every entry remembers its line for diagnostics.
struct ConfigDocument {
  std::string source;
  std::map<std::string, std::map<std::string, std::vector<ConfigEntry>>> sections;
  /// Line of the first header of each section.
  std::map<std::string, int> section_lines;
};

/// Throws ConfigError with "source:line: message".
ConfigDocument parseConfigDocument(std::istream& in, const std::string& source);

/// A number, a fraction "a/b", or a multiple of h: "h", "2h", "0.5h", "h/2", "2*h".
struct ScaledValue {
  double coefficient = 0.0;
  bool relative_to_h = false;

  double resolve(double h) const { return relative_to_h ? coefficient * h : coefficient; }
};

enum class SymbolSource { Generate, File, Inline };

struct InlineCoefficient {
  int ell = 0;
  int j = 0;
  int k = 0;
  cplx value;
};

struct Model1DSettings {
  double h = 0.01;
  double epsilon = 1.0;
  double amplitude = 1.0;
  double theta = 0.0;
  int count = 4;
};

struct ResCheckSettings {
  std::vector<double> h_values{0.01, 0.005};
  std::vector<ScaledValue> epsilon{{1.0, true}};
  double amplitude = 1.0;
  /// Lower end of the Re z scan in units of h~.
  double re_min_over_h_tilde = 5.0;
  /// Upper end; empty selects the largest Re z allowed by h~ |z|^{1/2} <= smallness.
  std::optional<double> re_max;
  int n_re = 16;
  /// Im z values in units of h~.
  std::vector<double> im_over_h_tilde{0.0, 0.5};
  double c_cutoff = 1.0;
  double c_im = 1.0;
  double smallness = 0.1;
};

struct ExperimentConfig {
  std::string source;
  /// Directory holding the config file; relative symbol files resolve against it.
  std::string base_dir = ".";

  SymbolSource symbol_source = SymbolSource::Generate;
  int degree = 2;
  double kappa = 2.0;
  std::optional<std::uint64_t> seed = 1;
  std::string symbol_file;
  std::vector<InlineCoefficient> inline_coefficients;

  std::vector<double> h_values{0.05};
  std::vector<ScaledValue> epsilon{{1.0, true}};
  double e1 = 0.85;
  double e2 = 1.0;
  std::string output_dir = "torspec_out";
  std::size_t dimension_cap = 3000;
  EigBackend backend = EigBackend::Auto;

  double classical_energy = 1.0;
  int classical_samples = 720;
  int curve_grid = 64;

  /// Empty selects every direction of rationalDirections(F).
  std::vector<RationalDirection> directions;
  int k_max = 3;
  int j_range = 2;
  /// Defaults to (E1 + E2) / 2.
  std::optional<double> predict_energy;
  /// Constant of the matching window |Re z - a| < h/(C0 sqrt eps),
  /// Im z/eps <= q_inf + C0 h/sqrt eps.
  double c0 = 4.0;

  Model1DSettings model1d;
  ResCheckSettings rescheck;

  std::vector<double> epsilonsFor(double h) const;
  double predictionEnergy() const { return predict_energy.value_or(0.5 * (e1 + e2)); }
};

/// Validates keys and values; throws ConfigError with line diagnostics.
ExperimentConfig buildConfig(const ConfigDocument& doc);
ExperimentConfig parseConfig(std::istream& in, const std::string& source);
/// Throws MissingInput when the file cannot be opened.
ExperimentConfig loadConfig(const std::string& path);

SymbolCoefficients resolveSymbol(const ExperimentConfig& config);

/// output_dir, prefixed by $TORSPEC_OUTPUT_ROOT when that is set and
/// output_dir is relative.
std::string resolveOutputDir(const ExperimentConfig& config);

struct StageReport {
  std::string stage;
  std::vector<std::string> files;
  std::vector<std::string> summary;
};

const std::vector<std::string>& stageNames();

StageReport runGenSymbol(const ExperimentConfig& config);
/// Files: classical_directions.txt (one record per canonical direction),
/// classical_segments.txt (both orientations, keyed by angle) and
/// classical_curve.txt (torus average and torus extrema over the circle).
StageReport runClassical(const ExperimentConfig& config);
/// One spectrum file per (h, eps). Throws DimensionCapExceeded when the
/// shell is larger than dimension_cap.
StageReport runSpectrum(const ExperimentConfig& config);
/// One prediction file per (h, eps, direction, orientation); directions
/// without a nondegenerate minimum are skipped and listed in the summary.
StageReport runPredict(const ExperimentConfig& config);
/// Needs the spectrum and prediction files. One match file per prediction
/// plus compare_summary.txt.
StageReport runCompare(const ExperimentConfig& config);
StageReport runModel1d(const ExperimentConfig& config);
StageReport runResCheck(const ExperimentConfig& config);
/// Dispatches by name; "all" runs every stage in pipeline order.
StageReport runStage(const ExperimentConfig& config, const std::string& stage);

/// 0 success, 2 configuration or input problems, 3 numerical failure.
int exitCodeFor(ErrorKind kind) noexcept;

}  // namespace torspec
