#include "aicrowd/core.hpp"

#include <cctype>
#include <stdexcept>

#include "aicrowd/error.hpp"

namespace aicrowd {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::EmptyAfterCleaning: return "EmptyAfterCleaning";
    case ErrorCode::MissingStratumKey: return "MissingStratumKey";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::PlaceholderMissing: return "PlaceholderMissing";
    case ErrorCode::InsufficientPairs: return "InsufficientPairs";
    case ErrorCode::NoValidVotes: return "NoValidVotes";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingGold: return "MissingGold";
    case ErrorCode::NoValidCells: return "NoValidCells";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::GateInsufficient: return "GateInsufficient";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "UnknownError";
}

std::string_view trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return s.substr(begin, end - begin);
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

LabelSchema::LabelSchema(std::string variable_name, std::vector<Label> labels)
    : variable_name_(std::move(variable_name)) {
  if (trim(variable_name_).empty()) {
    throw Error(ErrorCode::ConfigError, "schema variable_name must be non-empty");
  }
  labels_.reserve(labels.size());
  for (auto& raw : labels) {
    std::string label{trim(raw)};
    if (label.empty()) {
      throw Error(ErrorCode::ConfigError, "schema labels must be non-empty");
    }
    auto [it, inserted] = index_.emplace(label, labels_.size());
    (void)it;
    if (!inserted) {
      throw Error(ErrorCode::ConfigError, "duplicate schema label '" + label + "'");
    }
    labels_.push_back(std::move(label));
  }
  if (labels_.size() < 2) {
    throw Error(ErrorCode::ConfigError, "schema needs at least two labels");
  }
}

std::optional<std::size_t> LabelSchema::index_of(std::string_view label) const {
  auto it = index_.find(std::string(trim(label)));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> LabelSchema::fold_index_of(std::string_view label) const {
  const std::string folded = to_lower_ascii(trim(label));
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (to_lower_ascii(labels_[i]) == folded) {
      if (hit) return std::nullopt;  // ambiguous
      hit = i;
    }
  }
  return hit;
}

Codebook::Codebook(LabelSchema schema, std::string prompt_template,
                   std::unordered_map<Label, std::string> category_definitions,
                   std::string boundary_notes)
    : schema_(std::move(schema)),
      prompt_template_(std::move(prompt_template)),
      category_definitions_(std::move(category_definitions)),
      boundary_notes_(std::move(boundary_notes)) {
  std::size_t occurrences = 0;
  for (std::size_t pos = prompt_template_.find(kTextPlaceholder);
       pos != std::string::npos;
       pos = prompt_template_.find(kTextPlaceholder, pos + kTextPlaceholder.size())) {
    ++occurrences;
  }
  if (occurrences != 1) {
    throw Error(ErrorCode::PlaceholderMissing,
                "prompt template must contain '" + std::string(kTextPlaceholder) +
                    "' exactly once (found " + std::to_string(occurrences) + ")");
  }
  for (const auto& [label, definition] : category_definitions_) {
    (void)definition;
    if (!schema_.contains(label)) {
      throw Error(ErrorCode::UnknownLabel,
                  "category definition for '" + label + "' is not a schema label");
    }
  }
}

Annotation Annotation::labeled(Label value) {
  Annotation a;
  a.kind_ = Kind::Labeled;
  a.text_ = std::move(value);
  return a;
}

Annotation Annotation::response_error(std::string reason) {
  if (reason.empty()) {
    throw Error(ErrorCode::ConfigError, "ResponseError requires a non-empty reason");
  }
  Annotation a;
  a.kind_ = Kind::ResponseError;
  a.text_ = std::move(reason);
  return a;
}

const Label& Annotation::label() const {
  if (kind_ != Kind::Labeled) {
    throw std::logic_error("Annotation::label() on a non-Labeled cell");
  }
  return text_;
}

const std::string& Annotation::reason() const {
  if (kind_ != Kind::ResponseError) {
    throw std::logic_error("Annotation::reason() on a non-error cell");
  }
  return text_;
}

namespace {
std::unordered_map<std::string, std::size_t> build_index(
    const std::vector<std::string>& ids, const char* what) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto [it, inserted] = index.emplace(ids[i], i);
    (void)it;
    if (!inserted) {
      throw Error(ErrorCode::DuplicateId,
                  std::string("duplicate ") + what + " id '" + ids[i] + "'");
    }
  }
  return index;
}
}  // namespace

AnnotationMatrix::AnnotationMatrix(std::vector<std::string> instance_ids,
                                   std::vector<std::string> annotator_ids)
    : instance_ids_(std::move(instance_ids)),
      annotator_ids_(std::move(annotator_ids)),
      instance_index_(build_index(instance_ids_, "instance")),
      annotator_index_(build_index(annotator_ids_, "annotator")),
      cells_(instance_ids_.size() * annotator_ids_.size()) {}

std::optional<std::size_t> AnnotationMatrix::instance_index(std::string_view id) const {
  auto it = instance_index_.find(std::string(id));
  if (it == instance_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> AnnotationMatrix::annotator_index(std::string_view id) const {
  auto it = annotator_index_.find(std::string(id));
  if (it == annotator_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t AnnotationMatrix::cell_index(std::size_t instance, std::size_t annotator) const {
  // vector::at alone is not enough: an out-of-range annotator index would
  // alias into the next instance's row.
  if (instance >= instance_ids_.size() || annotator >= annotator_ids_.size()) {
    throw std::out_of_range("AnnotationMatrix cell (" + std::to_string(instance) + ", " +
                            std::to_string(annotator) + ") out of range");
  }
  return instance * annotator_ids_.size() + annotator;
}

const Annotation& AnnotationMatrix::at(std::size_t instance, std::size_t annotator) const {
  return cells_[cell_index(instance, annotator)];
}

void AnnotationMatrix::set(std::size_t instance, std::size_t annotator, Annotation value) {
  cells_[cell_index(instance, annotator)] = std::move(value);
}

const AnnotationMatrix& validate_matrix(const AnnotationMatrix& matrix,
                                        const LabelSchema& schema) {
  for (std::size_t i = 0; i < matrix.instance_count(); ++i) {
    for (std::size_t a = 0; a < matrix.annotator_count(); ++a) {
      const Annotation& cell = matrix.at(i, a);
      if (cell.is_labeled() && !schema.contains(cell.label())) {
        throw Error(ErrorCode::UnknownLabel,
                    "cell (" + matrix.instance_ids()[i] + ", " + matrix.annotator_ids()[a] +
                        ") holds '" + cell.label() + "', not in schema");
      }
    }
  }
  return matrix;
}

}  // namespace aicrowd
