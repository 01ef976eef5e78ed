#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "aicrowd/annotators.hpp"
#include "aicrowd/bootstrap.hpp"
#include "aicrowd/core.hpp"
#include "aicrowd/dataset.hpp"

namespace aicrowd {

// One JSON document drives a whole run. Shape:
//
//   {
//     "dataset": {"name": "...", "path": "data.csv",
//                 "columns": {"id": "...", "text": "...", "gold": "..."},
//                 "max_text_units": 4000, "sample_size": 800},
//     "schema": {"variable_name": "sentiment", "labels": ["Negative", "Positive"]}
//             | "schema.json",
//     "codebook": {"prompt_template": "..." | "prompt_template_path": "...",
//                  "category_definitions": {"Negative": "...", ...},
//                  "boundary_notes": "..."} (optional; a default template is
//                  assembled from the schema when omitted),
//     "annotators": [{"id": "...", "provider": "mock|openai_compatible|anthropic",
//                     ...per-provider fields...}],
//     "bootstrap": {"n_resamples": 1000, "level": 0.95},
//     "retry": {"max_retries": 3, "backoff_base_ms": 250, "backoff_cap_ms": 4000},
//     "seed": 42, "gate_override": false, "output_dir": "out"
//   }
//
// Relative paths are resolved against the config file's directory.
struct RunConfig {
  std::string dataset_name;
  std::string input_path;
  ColumnMap columns;
  std::size_t max_text_units = 4000;
  std::optional<std::size_t> sample_size;  // absent: keep the whole corpus

  LabelSchema schema{"label", {"A", "B"}};  // always overwritten by parse
  Codebook codebook{schema, std::string(kTextPlaceholder), {}, ""};

  std::vector<AnnotatorSpec> roster;
  BootstrapConfig bootstrap;
  RetryPolicy retry;
  std::uint64_t seed = 0;
  bool gate_override = false;
  std::string output_dir = ".";
};

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir);
RunConfig load_run_config(const std::string& path);

}  // namespace aicrowd
