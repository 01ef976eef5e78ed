#pragma once

#include <optional>
#include <string>

#include "aicrowd/annotators.hpp"
#include "aicrowd/consensus.hpp"
#include "aicrowd/core.hpp"
#include "aicrowd/dataset.hpp"
#include "aicrowd/diagnostics.hpp"
#include "aicrowd/reliability.hpp"
#include "aicrowd/validation.hpp"

// Artifact readers/writers. Every file is UTF-8 CSV with a header row and is
// written atomically (tmp + rename). Numeric cells use the shortest
// round-trip decimal form.

namespace aicrowd {

// How an annotation appears inside the annotated CSV: the label text for
// Labeled, "" for Missing, "response_error:<reason>" for errors (bare
// "response_error" when no finer reason is recorded).
std::string encode_annotation_cell(const Annotation& annotation);
Annotation decode_annotation_cell(std::string_view cell, const LabelSchema& schema);

// ---- {dataset}_prepared.csv: instance_id,text,gold_label -----------------
void write_prepared_csv(const std::string& path, const Dataset& dataset);
Dataset read_prepared_csv(const std::string& path, const LabelSchema& schema,
                          const std::string& dataset_name);

// ---- {dataset}_annotated.csv ----------------------------------------------
// instance_id,text,gold_label,<one column per annotator>, then
// majority_vote_label,majority_vote_consistency once aggregation has run.
void write_annotated_csv(const std::string& path, const Dataset& dataset,
                         const AnnotationMatrix& matrix,
                         const ConsensusTable* consensus = nullptr);

struct AnnotatedFile {
  Dataset dataset;
  AnnotationMatrix matrix;
  std::optional<ConsensusTable> consensus;
};
AnnotatedFile read_annotated_csv(const std::string& path, const LabelSchema& schema,
                                 const std::string& dataset_name);

// ---- krippendorff_alpha.csv -----------------------------------------------
// dataset,alpha,ci_lower,ci_upper,se,n_bootstrap,gate
void write_alpha_csv(const std::string& path, const std::string& dataset_name,
                     const ReliabilityRecord& record);
struct AlphaReportRow {
  std::string dataset;
  EstimateWithCI alpha;
  ReliabilityGate gate = ReliabilityGate::Insufficient;
};
AlphaReportRow read_alpha_csv(const std::string& path);

// ---- llm_mvskills.csv: dataset,annotator,skill,ci_lower,ci_upper,se,rank --
void write_skills_csv(const std::string& path, const std::string& dataset_name,
                      const std::vector<SkillRecord>& skills);
std::vector<SkillRecord> read_skills_csv(const std::string& path);

// ---- task_entropy_mvskills.csv: dataset,mean_entropy,ci_lower,ci_upper,se -
void write_entropy_csv(const std::string& path, const std::string& dataset_name,
                       const EstimateWithCI& mean_entropy);
EstimateWithCI read_entropy_csv(const std::string& path);

// ---- crowd_accuracy.csv / crowd_f1.csv -------------------------------------
// dataset,subject,mean,ci_lower,ci_upper,se,rank (same ranks in both files)
void write_leaderboard_csv(const std::string& accuracy_path, const std::string& f1_path,
                           const std::string& dataset_name,
                           const std::vector<LeaderboardRow>& rows);
std::vector<LeaderboardRow> read_leaderboard_csv(const std::string& accuracy_path,
                                                 const std::string& f1_path);

// ---- per-annotator raw response log ----------------------------------------
// instance_id,raw_response,parsed_label,error_reason,attempts,latency_ms
void write_response_log_csv(const std::string& path, const std::vector<ResponseLogRow>& rows);

// ---- annotation checkpoint --------------------------------------------------
struct CheckpointEntry {
  std::string instance_id;
  std::string annotator_id;
  Annotation annotation = Annotation::missing();
  std::string raw_response;
  std::uint32_t attempts = 0;
  double latency_ms = 0.0;
};
void write_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> read_checkpoint(const std::string& path, const LabelSchema& schema);

}  // namespace aicrowd
