#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "torspec/torspec.h"

namespace {

int report_failure(tsp_status status) {
  std::fprintf(stderr, "torspec: %s: %s\n", tsp_status_name(status), tsp_last_error());
  return tsp_exit_code(status);
}

int run(const std::string& stage, const std::string& config_path, const std::string& output,
        bool quiet) {
  tsp_config* config = nullptr;
  tsp_status status = tsp_config_load(config_path.c_str(), &config);
  if (status != TSP_OK) return report_failure(status);
  if (!output.empty()) {
    status = tsp_config_set_output(config, output.c_str());
    if (status != TSP_OK) {
      tsp_config_free(config);
      return report_failure(status);
    }
  }
  tsp_report* report = nullptr;
  status = tsp_run_stage(config, stage.c_str(), &report);
  tsp_config_free(config);
  if (status != TSP_OK) return report_failure(status);
  if (!quiet) {
    for (size_t i = 0; i < tsp_report_line_count(report); ++i)
      std::printf("%s\n", tsp_report_line(report, i));
    for (size_t i = 0; i < tsp_report_file_count(report); ++i)
      std::printf("wrote %s\n", tsp_report_file(report, i));
  }
  tsp_report_free(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of damped wave operators on the flat torus"};
  app.set_version_flag("--version", std::string(tsp_version()));
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string output;
    bool quiet = false;
  };
  const std::vector<std::pair<std::string, std::string>> stages = {
      {"gen-symbol", "generate or load the symbol and write symbol.txt"},
      {"classical", "torus averages, Q_inf segments and band per rational direction"},
      {"spectrum2d", "eigenvalues on the mode shell, one file per (h, eps)"},
      {"predict", "flat-torus lattice predictions per direction"},
      {"compare", "match computed spectra against predictions"},
      {"model1d", "one-dimensional model spectrum and harmonic ladder"},
      {"rescheck", "resolvent norm probes on the model operator"},
      {"all", "run every stage in pipeline order"},
  };
  std::vector<Options> options(stages.size());
  std::vector<CLI::App*> commands;
  for (size_t i = 0; i < stages.size(); ++i) {
    CLI::App* sub = app.add_subcommand(stages[i].first, stages[i].second);
    sub->add_option("-c,--config", options[i].config, "experiment config file")->required();
    sub->add_option("-o,--output", options[i].output, "output directory (overrides the config)");
    sub->add_flag("-q,--quiet", options[i].quiet, "suppress the summary");
    commands.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (size_t i = 0; i < stages.size(); ++i)
    if (commands[i]->parsed())
      return run(stages[i].first, options[i].config, options[i].output, options[i].quiet);
  return 2;
}
