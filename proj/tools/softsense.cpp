// softsense: command line driver for the batch soft-sensor pipeline.
//
// Exit codes: 0 on success, 1 when a computation fails (e.g. a model fit
// diverges), 2 on usage errors or missing/malformed inputs.
#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "softsense/config.hpp"
#include "softsense/pipeline.hpp"
#include "softsense/tables.hpp"

namespace {

using StageFn = void (*)(const softsense::PipelineConfig&);

struct Stage {
  const char* name;
  const char* help;
  StageFn run;
};

constexpr Stage kStages[] = {
    {"synth", "generate synthetic raw sensor and lab data", &softsense::run_synth},
    {"prep-lab", "clean the raw lab table", &softsense::run_prep_lab},
    {"prep-sensors", "repair sensor channels and flag abnormal periods", &softsense::run_prep_sensors},
    {"align", "align sensors with lab samples and split train/test", &softsense::run_align},
    {"baseline", "fit per-point seasonal ARIMA baselines", &softsense::run_baseline},
    {"train", "train the neural soft sensor", &softsense::run_train},
    {"explain", "compute Shapley feature attributions on the test split", &softsense::run_explain},
    {"evaluate", "score the model against the baseline and write the report", &softsense::run_evaluate},
    {"all", "run every stage in order", &softsense::run_all},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch soft-sensor pipeline for multi-point temperature estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  StageFn selected = nullptr;

  for (const Stage& stage : kStages) {
    CLI::App* sub = app.add_subcommand(stage.name, stage.help);
    sub->add_option("--config", config_path, "configuration file (defaults apply when omitted)");
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->callback([&, sub, run = stage.run] {
      selected = run;
      seed_given = sub->count("--seed") > 0;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    softsense::PipelineConfig cfg;
    if (!config_path.empty()) cfg = softsense::load_config(config_path);
    if (seed_given) softsense::set_master_seed(cfg, seed);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    cfg.validate();
    selected(cfg);
  } catch (const softsense::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
