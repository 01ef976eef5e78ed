#pragma once

#include "aicrowd/annotators.hpp"
#include "aicrowd/config.hpp"

namespace aicrowd {

enum class ExitStatus : int {
  Ok = 0,
  ConfigError = 2,
  GateStop = 3,
  AnnotationFailure = 4,
  StageFailure = 5,
};

struct PipelineOptions {
  std::string out_dir;                    // overrides config.output_dir when set
  std::optional<std::uint64_t> seed;      // overrides config.seed when set
  bool force_gate = false;                // OR-ed with config.gate_override
  bool resume = false;
  int threads = 0;                        // 0: hardware concurrency
  ClientFactory client_factory;           // test injection; default make_client
  Sleeper sleeper;                        // test injection; default real sleep
};

// Each stage consumes only artifacts of earlier stages from the output
// directory and leaves its own artifacts there. All return Ok or the mapped
// failure status after logging the underlying error.
ExitStatus stage_prepare(const RunConfig& config, const PipelineOptions& options);
ExitStatus stage_annotate(const RunConfig& config, const PipelineOptions& options);
ExitStatus stage_reliability(const RunConfig& config, const PipelineOptions& options);
ExitStatus stage_aggregate(const RunConfig& config, const PipelineOptions& options);
ExitStatus stage_diagnose(const RunConfig& config, const PipelineOptions& options);
ExitStatus stage_validate(const RunConfig& config, const PipelineOptions& options);

// prepare -> annotate -> reliability -> (gate) -> aggregate -> diagnose ->
// validate (when gold is present). Stops with GateStop when alpha gates
// `insufficient` and no override is in force; krippendorff_alpha.csv is
// still emitted first.
ExitStatus run_protocol(const RunConfig& config, const PipelineOptions& options);

}  // namespace aicrowd
