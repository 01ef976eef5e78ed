#include "aicrowd/reports.hpp"

#include <algorithm>

#include "aicrowd/csv.hpp"
#include "aicrowd/error.hpp"

namespace aicrowd {

namespace {

constexpr std::string_view kErrorCellPrefix = "response_error";

void expect_header(const std::vector<CsvRow>& rows, const CsvRow& expected,
                   const std::string& path) {
  if (rows.empty() || rows.front() != expected) {
    throw Error(ErrorCode::ParseError, "'" + path + "' lacks the expected header row");
  }
}

std::string require_field(const CsvRow& row, std::size_t idx, const std::string& path,
                          std::size_t line) {
  if (idx >= row.size()) {
    throw Error(ErrorCode::ParseError,
                "'" + path + "' row " + std::to_string(line) + " is short");
  }
  return row[idx];
}

EstimateWithCI estimate_from(const CsvRow& row, std::size_t first) {
  EstimateWithCI est;
  est.point = parse_double(row[first]);
  est.lower = parse_double(row[first + 1]);
  est.upper = parse_double(row[first + 2]);
  est.se = parse_double(row[first + 3]);
  return est;
}

}  // namespace

std::string encode_annotation_cell(const Annotation& annotation) {
  switch (annotation.kind()) {
    case Annotation::Kind::Missing:
      return "";
    case Annotation::Kind::Labeled:
      return annotation.label();
    case Annotation::Kind::ResponseError:
      if (annotation.reason() == kErrorCellPrefix) return std::string(kErrorCellPrefix);
      return std::string(kErrorCellPrefix) + ":" + annotation.reason();
  }
  return "";
}

Annotation decode_annotation_cell(std::string_view cell, const LabelSchema& schema) {
  if (cell.empty()) return Annotation::missing();
  if (cell == kErrorCellPrefix) {
    return Annotation::response_error(std::string(kErrorCellPrefix));
  }
  if (cell.size() > kErrorCellPrefix.size() + 1 &&
      cell.substr(0, kErrorCellPrefix.size()) == kErrorCellPrefix &&
      cell[kErrorCellPrefix.size()] == ':') {
    return Annotation::response_error(std::string(cell.substr(kErrorCellPrefix.size() + 1)));
  }
  const auto idx = schema.index_of(cell);
  if (!idx) {
    throw Error(ErrorCode::UnknownLabel,
                "annotated cell '" + std::string(cell) + "' is not in the schema");
  }
  return Annotation::labeled(schema.labels()[*idx]);
}

void write_prepared_csv(const std::string& path, const Dataset& dataset) {
  std::vector<CsvRow> rows;
  rows.reserve(dataset.size() + 1);
  rows.push_back({"instance_id", "text", "gold_label"});
  for (const Instance& inst : dataset.instances()) {
    rows.push_back({inst.id, inst.text, inst.gold.value_or("")});
  }
  write_csv_file(path, rows);
}

Dataset read_prepared_csv(const std::string& path, const LabelSchema& schema,
                          const std::string& dataset_name) {
  return load_dataset(path, schema, dataset_name, ColumnMap{});
}

void write_annotated_csv(const std::string& path, const Dataset& dataset,
                         const AnnotationMatrix& matrix, const ConsensusTable* consensus) {
  if (matrix.instance_count() != dataset.size()) {
    throw Error(ErrorCode::LengthMismatch, "matrix does not cover the dataset");
  }
  if (consensus && consensus->records.size() != matrix.instance_count()) {
    throw Error(ErrorCode::LengthMismatch, "consensus does not cover the matrix");
  }

  std::vector<CsvRow> rows;
  rows.reserve(dataset.size() + 1);
  CsvRow header{"instance_id", "text", "gold_label"};
  header.insert(header.end(), matrix.annotator_ids().begin(), matrix.annotator_ids().end());
  if (consensus) {
    header.push_back("majority_vote_label");
    header.push_back("majority_vote_consistency");
  }
  rows.push_back(std::move(header));

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Instance& inst = dataset.instances()[i];
    CsvRow row{inst.id, inst.text, inst.gold.value_or("")};
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      row.push_back(encode_annotation_cell(matrix.at(i, a)));
    }
    if (consensus) {
      row.push_back(consensus->records[i].label);
      row.push_back(format_double(consensus->records[i].consistency));
    }
    rows.push_back(std::move(row));
  }
  write_csv_file(path, rows);
}

AnnotatedFile read_annotated_csv(const std::string& path, const LabelSchema& schema,
                                 const std::string& dataset_name) {
  const std::vector<CsvRow> rows = read_csv_file(path);
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyFile, "'" + path + "' has no header row");
  }
  const CsvRow& header = rows.front();
  if (header.size() < 4 || header[0] != "instance_id" || header[1] != "text" ||
      header[2] != "gold_label") {
    throw Error(ErrorCode::ParseError,
                "'" + path + "' is not an annotated dataset file");
  }

  std::size_t annotator_end = header.size();
  bool has_consensus = false;
  for (std::size_t c = 3; c < header.size(); ++c) {
    if (header[c] == "majority_vote_label") {
      if (c + 2 != header.size() || header[c + 1] != "majority_vote_consistency") {
        throw Error(ErrorCode::ParseError,
                    "'" + path + "' has malformed consensus columns");
      }
      annotator_end = c;
      has_consensus = true;
      break;
    }
  }
  if (annotator_end <= 3) {
    throw Error(ErrorCode::ParseError, "'" + path + "' has no annotator columns");
  }

  std::vector<std::string> instance_ids;
  std::vector<Instance> instances;
  std::vector<std::string> annotator_ids(header.begin() + 3, header.begin() + annotator_end);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.size() != header.size()) {
      throw Error(ErrorCode::ParseError,
                  "'" + path + "' row " + std::to_string(r) + " is malformed");
    }
    instance_ids.push_back(row[0]);
    Instance inst{row[0], row[1], std::nullopt};
    if (!row[2].empty()) inst.gold = row[2];
    instances.push_back(std::move(inst));
  }

  AnnotatedFile out{Dataset(dataset_name, schema, std::move(instances)),
                    AnnotationMatrix(std::move(instance_ids), std::move(annotator_ids)),
                    std::nullopt};
  if (has_consensus) out.consensus.emplace();

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    const std::size_t i = r - 1;
    for (std::size_t a = 0; a < out.matrix.annotator_count(); ++a) {
      out.matrix.set(i, a, decode_annotation_cell(row[3 + a], schema));
    }
    if (has_consensus) {
      ConsensusRecord record;
      record.instance_id = row[0];
      record.label = row[annotator_end];
      record.consistency = parse_double(row[annotator_end + 1]);
      std::uint32_t valid = 0;
      for (std::size_t a = 0; a < out.matrix.annotator_count(); ++a) {
        if (out.matrix.at(i, a).is_labeled()) ++valid;
      }
      record.valid_votes = valid;
      record.tie = record.consistency == 0.0;
      out.consensus->records.push_back(std::move(record));
    }
  }
  return out;
}

void write_alpha_csv(const std::string& path, const std::string& dataset_name,
                     const ReliabilityRecord& record) {
  std::vector<CsvRow> rows;
  rows.push_back({"dataset", "alpha", "ci_lower", "ci_upper", "se", "n_bootstrap", "gate"});
  rows.push_back({dataset_name, format_double(record.alpha.point),
                  format_double(record.alpha.lower), format_double(record.alpha.upper),
                  format_double(record.alpha.se), std::to_string(record.alpha.n_resamples),
                  gate_name(record.gate)});
  write_csv_file(path, rows);
}

AlphaReportRow read_alpha_csv(const std::string& path) {
  const std::vector<CsvRow> rows = read_csv_file(path);
  expect_header(rows, {"dataset", "alpha", "ci_lower", "ci_upper", "se", "n_bootstrap", "gate"},
                path);
  if (rows.size() != 2) {
    throw Error(ErrorCode::ParseError, "'" + path + "' must hold exactly one record");
  }
  const CsvRow& row = rows[1];
  AlphaReportRow out;
  out.dataset = require_field(row, 0, path, 1);
  out.alpha = estimate_from(row, 1);
  out.alpha.n_resamples = static_cast<int>(parse_integer(require_field(row, 5, path, 1)));
  out.gate = parse_gate(require_field(row, 6, path, 1));
  return out;
}

void write_skills_csv(const std::string& path, const std::string& dataset_name,
                      const std::vector<SkillRecord>& skills) {
  std::vector<CsvRow> rows;
  rows.reserve(skills.size() + 1);
  rows.push_back({"dataset", "annotator", "skill", "ci_lower", "ci_upper", "se", "rank"});
  for (const SkillRecord& record : skills) {
    rows.push_back({dataset_name, record.annotator_id, format_double(record.skill.point),
                    format_double(record.skill.lower), format_double(record.skill.upper),
                    format_double(record.skill.se), std::to_string(record.rank)});
  }
  write_csv_file(path, rows);
}

std::vector<SkillRecord> read_skills_csv(const std::string& path) {
  const std::vector<CsvRow> rows = read_csv_file(path);
  expect_header(rows, {"dataset", "annotator", "skill", "ci_lower", "ci_upper", "se", "rank"},
                path);
  std::vector<SkillRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    SkillRecord record;
    record.annotator_id = require_field(row, 1, path, r);
    record.skill = estimate_from(row, 2);
    record.rank = static_cast<std::uint32_t>(parse_integer(require_field(row, 6, path, r)));
    out.push_back(std::move(record));
  }
  return out;
}

void write_entropy_csv(const std::string& path, const std::string& dataset_name,
                       const EstimateWithCI& mean_entropy) {
  std::vector<CsvRow> rows;
  rows.push_back({"dataset", "mean_entropy", "ci_lower", "ci_upper", "se"});
  rows.push_back({dataset_name, format_double(mean_entropy.point),
                  format_double(mean_entropy.lower), format_double(mean_entropy.upper),
                  format_double(mean_entropy.se)});
  write_csv_file(path, rows);
}

EstimateWithCI read_entropy_csv(const std::string& path) {
  const std::vector<CsvRow> rows = read_csv_file(path);
  expect_header(rows, {"dataset", "mean_entropy", "ci_lower", "ci_upper", "se"}, path);
  if (rows.size() != 2) {
    throw Error(ErrorCode::ParseError, "'" + path + "' must hold exactly one record");
  }
  return estimate_from(rows[1], 1);
}

namespace {

void write_leaderboard_file(const std::string& path, const std::string& dataset_name,
                            const std::vector<LeaderboardRow>& rows, bool f1) {
  std::vector<CsvRow> out;
  out.reserve(rows.size() + 1);
  out.push_back({"dataset", "subject", "mean", "ci_lower", "ci_upper", "se", "rank"});
  for (const LeaderboardRow& row : rows) {
    const EstimateWithCI& est = f1 ? row.macro_f1 : row.accuracy;
    out.push_back({dataset_name, row.subject, format_double(est.point),
                   format_double(est.lower), format_double(est.upper),
                   format_double(est.se), std::to_string(row.rank)});
  }
  write_csv_file(path, out);
}

}  // namespace

void write_leaderboard_csv(const std::string& accuracy_path, const std::string& f1_path,
                           const std::string& dataset_name,
                           const std::vector<LeaderboardRow>& rows) {
  write_leaderboard_file(accuracy_path, dataset_name, rows, /*f1=*/false);
  write_leaderboard_file(f1_path, dataset_name, rows, /*f1=*/true);
}

std::vector<LeaderboardRow> read_leaderboard_csv(const std::string& accuracy_path,
                                                 const std::string& f1_path) {
  const CsvRow header{"dataset", "subject", "mean", "ci_lower", "ci_upper", "se", "rank"};
  const std::vector<CsvRow> acc = read_csv_file(accuracy_path);
  const std::vector<CsvRow> f1 = read_csv_file(f1_path);
  expect_header(acc, header, accuracy_path);
  expect_header(f1, header, f1_path);
  if (acc.size() != f1.size()) {
    throw Error(ErrorCode::ParseError, "accuracy and f1 leaderboards disagree on rows");
  }

  std::vector<LeaderboardRow> out;
  for (std::size_t r = 1; r < acc.size(); ++r) {
    const CsvRow& arow = acc[r];
    const CsvRow& frow = f1[r];
    if (require_field(arow, 1, accuracy_path, r) != require_field(frow, 1, f1_path, r)) {
      throw Error(ErrorCode::ParseError, "leaderboard files disagree on subject order");
    }
    LeaderboardRow row;
    row.subject = arow[1];
    row.accuracy = estimate_from(arow, 2);
    row.macro_f1 = estimate_from(frow, 2);
    row.rank = static_cast<std::uint32_t>(parse_integer(require_field(arow, 6, accuracy_path, r)));
    if (row.rank != static_cast<std::uint32_t>(parse_integer(frow[6]))) {
      throw Error(ErrorCode::ParseError, "leaderboard files disagree on ranks");
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_response_log_csv(const std::string& path, const std::vector<ResponseLogRow>& rows) {
  std::vector<CsvRow> out;
  out.reserve(rows.size() + 1);
  out.push_back(
      {"instance_id", "raw_response", "parsed_label", "error_reason", "attempts", "latency_ms"});
  for (const ResponseLogRow& row : rows) {
    out.push_back({row.instance_id, row.raw_response, row.parsed_label, row.error_reason,
                   std::to_string(row.attempts), format_double(row.latency_ms)});
  }
  write_csv_file(path, out);
}

void write_checkpoint(const std::string& path, const std::vector<CheckpointEntry>& entries) {
  std::vector<CsvRow> rows;
  rows.reserve(entries.size() + 1);
  rows.push_back(
      {"instance_id", "annotator_id", "annotation", "raw_response", "attempts", "latency_ms"});
  for (const CheckpointEntry& entry : entries) {
    rows.push_back({entry.instance_id, entry.annotator_id,
                    encode_annotation_cell(entry.annotation), entry.raw_response,
                    std::to_string(entry.attempts), format_double(entry.latency_ms)});
  }
  write_csv_file(path, rows);
}

std::vector<CheckpointEntry> read_checkpoint(const std::string& path,
                                             const LabelSchema& schema) {
  const std::vector<CsvRow> rows = read_csv_file(path);
  expect_header(
      rows,
      {"instance_id", "annotator_id", "annotation", "raw_response", "attempts", "latency_ms"},
      path);
  std::vector<CheckpointEntry> out;
  out.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    CheckpointEntry entry;
    entry.instance_id = require_field(row, 0, path, r);
    entry.annotator_id = require_field(row, 1, path, r);
    entry.annotation = decode_annotation_cell(require_field(row, 2, path, r), schema);
    entry.raw_response = require_field(row, 3, path, r);
    entry.attempts = static_cast<std::uint32_t>(parse_integer(require_field(row, 4, path, r)));
    entry.latency_ms = parse_double(require_field(row, 5, path, r));
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace aicrowd
