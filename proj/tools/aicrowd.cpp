#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "aicrowd/config.hpp"
#include "aicrowd/error.hpp"
#include "aicrowd/pipeline.hpp"

namespace {

using StageFn = aicrowd::ExitStatus (*)(const aicrowd::RunConfig&,
                                        const aicrowd::PipelineOptions&);

struct SubcommandState {
  CLI::App* app = nullptr;
  CLI::Option* seed_option = nullptr;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool force_gate = false;
  bool resume = false;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble annotation, consensus and reliability toolkit"};
  app.require_subcommand(1);

  const std::map<std::string, std::pair<const char*, StageFn>> stages{
      {"prepare", {"Clean the corpus and draw the working sample", aicrowd::stage_prepare}},
      {"annotate", {"Label every instance with the configured roster", aicrowd::stage_annotate}},
      {"reliability", {"Compute Krippendorff's alpha and the gate", aicrowd::stage_reliability}},
      {"aggregate", {"Derive the majority-vote consensus", aicrowd::stage_aggregate}},
      {"diagnose", {"Annotator skills and entropy uncertainty", aicrowd::stage_diagnose}},
      {"validate", {"Score the crowd against gold labels", aicrowd::stage_validate}},
      {"run", {"Run every stage in order", aicrowd::run_protocol}},
  };

  std::map<std::string, SubcommandState> state;
  for (const auto& [name, stage] : stages) {
    SubcommandState& s = state[name];
    s.app = app.add_subcommand(name, stage.first);
    s.app->add_option("--config", s.config_path, "Run configuration (JSON)")
        ->required();
    s.app->add_option("--out", s.out_dir, "Output directory (overrides the config)");
    s.seed_option = s.app->add_option("--seed", s.seed, "Seed override (u64)");
    s.app->add_flag("--force-gate", s.force_gate,
                    "Proceed past an insufficient reliability gate");
    s.app->add_flag("--resume", s.resume, "Reuse the annotation checkpoint");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(aicrowd::ExitStatus::ConfigError);
  }

  for (const auto& [name, stage] : stages) {
    const SubcommandState& s = state.at(name);
    if (!s.app->parsed()) continue;

    aicrowd::RunConfig config;
    try {
      config = aicrowd::load_run_config(s.config_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "config: %s\n", e.what());
      return static_cast<int>(aicrowd::ExitStatus::ConfigError);
    }

    aicrowd::PipelineOptions options;
    options.out_dir = s.out_dir;
    if (s.seed_option->count() > 0) options.seed = s.seed;
    options.force_gate = s.force_gate;
    options.resume = s.resume;
    return static_cast<int>(stage.second(config, options));
  }
  return static_cast<int>(aicrowd::ExitStatus::ConfigError);  // unreachable
}
