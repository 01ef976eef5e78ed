#include "aicrowd/pipeline.hpp"

#include <filesystem>
#include <thread>

#include "aicrowd/consensus.hpp"
#include "aicrowd/csv.hpp"
#include "aicrowd/diagnostics.hpp"
#include "aicrowd/error.hpp"
#include "aicrowd/log.hpp"
#include "aicrowd/reliability.hpp"
#include "aicrowd/reports.hpp"
#include "aicrowd/validation.hpp"

namespace aicrowd {

namespace {

RunConfig effective_config(const RunConfig& config, const PipelineOptions& options) {
  RunConfig cfg = config;
  if (options.seed) {
    cfg.seed = *options.seed;
    cfg.bootstrap.seed = *options.seed;
  }
  if (!options.out_dir.empty()) cfg.output_dir = options.out_dir;
  if (options.force_gate) cfg.gate_override = true;
  return cfg;
}

int worker_threads(const PipelineOptions& options) {
  if (options.threads > 0) return options.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 4;
}

std::string artifact_path(const RunConfig& cfg, const std::string& file) {
  return (std::filesystem::path(cfg.output_dir) / file).string();
}

std::string prepared_path(const RunConfig& cfg) {
  return artifact_path(cfg, cfg.dataset_name + "_prepared.csv");
}
std::string annotated_path(const RunConfig& cfg) {
  return artifact_path(cfg, cfg.dataset_name + "_annotated.csv");
}
std::string checkpoint_path(const RunConfig& cfg) {
  return artifact_path(cfg, cfg.dataset_name + "_checkpoint.csv");
}
std::string alpha_path(const RunConfig& cfg) {
  return artifact_path(cfg, "krippendorff_alpha.csv");
}

std::string sanitize_for_filename(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
    if (!ok) c = '_';
  }
  return out;
}

ExitStatus report_failure(ExitStatus status, const char* stage) {
  try {
    throw;
  } catch (const Error& e) {
    log_warn(std::string(stage) + ": " + e.what());
  } catch (const std::exception& e) {
    log_warn(std::string(stage) + ": " + e.what());
  }
  return status;
}

// The annotated file with consensus columns, as every post-aggregation stage
// consumes it.
AnnotatedFile read_aggregated(const RunConfig& cfg) {
  AnnotatedFile file = read_annotated_csv(annotated_path(cfg), cfg.schema, cfg.dataset_name);
  if (!file.consensus) {
    throw Error(ErrorCode::ParseError,
                "'" + annotated_path(cfg) + "' has no consensus columns; run aggregate first");
  }
  return file;
}

void enforce_gate(const RunConfig& cfg) {
  const AlphaReportRow alpha = read_alpha_csv(alpha_path(cfg));
  if (alpha.gate != ReliabilityGate::Insufficient) return;
  if (cfg.gate_override) {
    log_warn("alpha " + format_double(alpha.alpha.point) +
             " gates 'insufficient'; proceeding because the gate override is set");
    return;
  }
  throw Error(ErrorCode::GateInsufficient,
              "alpha " + format_double(alpha.alpha.point) +
                  " gates 'insufficient'; refine prompts or ensemble, or pass --force-gate");
}

}  // namespace

ExitStatus stage_prepare(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);
  try {
    std::filesystem::create_directories(cfg.output_dir);
    const Dataset raw =
        load_dataset(cfg.input_path, cfg.schema, cfg.dataset_name, cfg.columns);

    std::vector<Instance> cleaned;
    cleaned.reserve(raw.size());
    std::size_t dropped = 0;
    for (const Instance& inst : raw.instances()) {
      try {
        cleaned.push_back({inst.id, clean_text(inst.text, cfg.max_text_units), inst.gold});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
        ++dropped;
      }
    }
    if (dropped) {
      log_warn(std::to_string(dropped) + " instances were empty after cleaning and dropped");
    }
    Dataset dataset(cfg.dataset_name, cfg.schema, std::move(cleaned));
    if (cfg.sample_size) {
      dataset = stratified_sample(dataset, *cfg.sample_size, cfg.seed);
    }
    write_prepared_csv(prepared_path(cfg), dataset);
    log_info("prepared " + std::to_string(dataset.size()) + " instances -> " +
             prepared_path(cfg));
    return ExitStatus::Ok;
  } catch (...) {
    return report_failure(ExitStatus::StageFailure, "prepare");
  }
}

ExitStatus stage_annotate(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);
  try {
    const Dataset dataset =
        read_prepared_csv(prepared_path(cfg), cfg.schema, cfg.dataset_name);

    RunCrowdOptions crowd;
    crowd.client_factory = options.client_factory;
    crowd.sleeper = options.sleeper;
    crowd.retry = cfg.retry;
    crowd.seed = cfg.seed;
    crowd.checkpoint_path = checkpoint_path(cfg);
    crowd.resume = options.resume;
    const CrowdResult result = run_crowd(cfg.roster, dataset, cfg.codebook, crowd);

    std::size_t labeled = 0;
    for (std::size_t i = 0; i < result.matrix.instance_count(); ++i) {
      for (std::size_t a = 0; a < result.matrix.annotator_count(); ++a) {
        if (result.matrix.at(i, a).is_labeled()) ++labeled;
      }
    }
    if (labeled == 0) {
      throw Error(ErrorCode::NoValidCells, "no annotator produced a single label");
    }

    validate_matrix(result.matrix, cfg.schema);
    write_annotated_csv(annotated_path(cfg), dataset, result.matrix, nullptr);
    for (const auto& [annotator_id, rows] : result.logs) {
      write_response_log_csv(
          artifact_path(cfg, cfg.dataset_name + "_responses_" +
                                 sanitize_for_filename(annotator_id) + ".csv"),
          rows);
    }
    log_info("annotated " + std::to_string(result.matrix.instance_count()) + " x " +
             std::to_string(result.matrix.annotator_count()) + " cells (" +
             std::to_string(result.queried_cells) + " queried) -> " + annotated_path(cfg));
    return ExitStatus::Ok;
  } catch (...) {
    return report_failure(ExitStatus::AnnotationFailure, "annotate");
  }
}

ExitStatus stage_reliability(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);
  try {
    const AnnotatedFile file =
        read_annotated_csv(annotated_path(cfg), cfg.schema, cfg.dataset_name);
    const ReliabilityRecord record = reliability_report(
        validate_matrix(file.matrix, cfg.schema), cfg.bootstrap, worker_threads(options));
    if (record.degenerate) {
      log_warn("expected disagreement is zero (single label everywhere); alpha reported as 1");
    }
    write_alpha_csv(alpha_path(cfg), cfg.dataset_name, record);
    log_info("alpha " + format_double(record.alpha.point) + " [" +
             format_double(record.alpha.lower) + ", " + format_double(record.alpha.upper) +
             "] gate=" + gate_name(record.gate) + " -> " + alpha_path(cfg));
    return ExitStatus::Ok;
  } catch (...) {
    return report_failure(ExitStatus::StageFailure, "reliability");
  }
}

ExitStatus stage_aggregate(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);
  try {
    enforce_gate(cfg);
  } catch (const Error& e) {
    log_warn(std::string("aggregate: ") + e.what());
    return e.code() == ErrorCode::GateInsufficient ? ExitStatus::GateStop
                                                    : ExitStatus::StageFailure;
  }
  try {
    const AnnotatedFile file =
        read_annotated_csv(annotated_path(cfg), cfg.schema, cfg.dataset_name);
    const ConsensusTable consensus = majority_vote(file.matrix);
    write_annotated_csv(annotated_path(cfg), file.dataset, file.matrix, &consensus);
    log_info("consensus for " + std::to_string(consensus.records.size()) +
             " instances (tie rate " + format_double(tie_rate(consensus)) + ") -> " +
             annotated_path(cfg));
    return ExitStatus::Ok;
  } catch (...) {
    return report_failure(ExitStatus::StageFailure, "aggregate");
  }
}

ExitStatus stage_diagnose(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);
  try {
    const AnnotatedFile file = read_aggregated(cfg);
    const int threads = worker_threads(options);
    const std::vector<SkillRecord> skills =
        annotator_skills(file.matrix, *file.consensus, cfg.bootstrap, threads);
    const UncertaintyRecord uncertainty =
        task_uncertainty(file.matrix, skills, cfg.bootstrap, threads);
    write_skills_csv(artifact_path(cfg, "llm_mvskills.csv"), cfg.dataset_name, skills);
    write_entropy_csv(artifact_path(cfg, "task_entropy_mvskills.csv"), cfg.dataset_name,
                      uncertainty.mean_entropy);
    log_info("mean entropy " + format_double(uncertainty.mean_entropy.point) + " over " +
             std::to_string(uncertainty.per_instance.size()) + " instances");
    return ExitStatus::Ok;
  } catch (...) {
    return report_failure(ExitStatus::StageFailure, "diagnose");
  }
}

ExitStatus stage_validate(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);
  try {
    const AnnotatedFile file = read_aggregated(cfg);
    std::vector<std::optional<Label>> gold;
    gold.reserve(file.dataset.size());
    for (const Instance& inst : file.dataset.instances()) gold.push_back(inst.gold);
    const std::vector<LeaderboardRow> rows = evaluate_crowd(
        file.matrix, *file.consensus, gold, cfg.bootstrap, worker_threads(options));
    write_leaderboard_csv(artifact_path(cfg, "crowd_accuracy.csv"),
                          artifact_path(cfg, "crowd_f1.csv"), cfg.dataset_name, rows);
    log_info("leaderboard of " + std::to_string(rows.size()) + " subjects written");
    return ExitStatus::Ok;
  } catch (...) {
    return report_failure(ExitStatus::StageFailure, "validate");
  }
}

ExitStatus run_protocol(const RunConfig& config, const PipelineOptions& options) {
  const RunConfig cfg = effective_config(config, options);

  ExitStatus status = stage_prepare(config, options);
  if (status != ExitStatus::Ok) return status;
  status = stage_annotate(config, options);
  if (status != ExitStatus::Ok) return status;
  status = stage_reliability(config, options);
  if (status != ExitStatus::Ok) return status;

  // The gate between reliability and aggregation; krippendorff_alpha.csv is
  // already on disk at this point.
  try {
    enforce_gate(cfg);
  } catch (const Error& e) {
    log_warn(e.what());
    return e.code() == ErrorCode::GateInsufficient ? ExitStatus::GateStop
                                                    : ExitStatus::StageFailure;
  }

  status = stage_aggregate(config, options);
  if (status != ExitStatus::Ok) return status;
  status = stage_diagnose(config, options);
  if (status != ExitStatus::Ok) return status;

  bool gold_everywhere = true;
  try {
    const Dataset prepared =
        read_prepared_csv(prepared_path(cfg), cfg.schema, cfg.dataset_name);
    for (const Instance& inst : prepared.instances()) {
      if (!inst.gold) {
        gold_everywhere = false;
        break;
      }
    }
  } catch (...) {
    return report_failure(ExitStatus::StageFailure, "validate");
  }
  if (!gold_everywhere) {
    log_info("gold labels absent; skipping validation");
    return ExitStatus::Ok;
  }
  return stage_validate(config, options);
}

}  // namespace aicrowd
