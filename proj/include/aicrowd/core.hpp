#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aicrowd {

// A label is plain text; it is valid only when it matches one schema entry
// byte-for-byte after trimming surrounding whitespace (no case folding).
using Label = std::string;

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);

// Closed, ordered set of mutually exclusive labels for one variable.
// The stored order is fixed at construction and is never used for
// tie-breaking (ties break on label text, not schema position).
class LabelSchema {
 public:
  LabelSchema(std::string variable_name, std::vector<Label> labels);

  const std::string& variable_name() const { return variable_name_; }
  const std::vector<Label>& labels() const { return labels_; }
  std::size_t label_count() const { return labels_.size(); }

  // Exact match after trimming surrounding whitespace.
  std::optional<std::size_t> index_of(std::string_view label) const;
  // Unique ASCII case-insensitive match; nullopt when absent or ambiguous.
  std::optional<std::size_t> fold_index_of(std::string_view label) const;
  bool contains(std::string_view label) const {
    return index_of(label).has_value();
  }

 private:
  std::string variable_name_;
  std::vector<Label> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Token that a prompt template must contain exactly once; replaced by the
// instance text when the prompt is rendered.
inline constexpr std::string_view kTextPlaceholder = "{text}";

// Label schema plus the prose that turns it into a prompt.
class Codebook {
 public:
  Codebook(LabelSchema schema, std::string prompt_template,
           std::unordered_map<Label, std::string> category_definitions = {},
           std::string boundary_notes = {});

  const LabelSchema& schema() const { return schema_; }
  const std::string& prompt_template() const { return prompt_template_; }
  const std::unordered_map<Label, std::string>& category_definitions() const {
    return category_definitions_;
  }
  const std::string& boundary_notes() const { return boundary_notes_; }

 private:
  LabelSchema schema_;
  std::string prompt_template_;
  std::unordered_map<Label, std::string> category_definitions_;
  std::string boundary_notes_;
};

struct Instance {
  std::string id;
  std::string text;
  std::optional<Label> gold;
};

// One cell of the annotation grid. ResponseError records a failed attempt
// (the reason is one of the canonical tokens below); Missing means never
// attempted, which is what checkpoint resume re-queries.
class Annotation {
 public:
  enum class Kind { Missing, Labeled, ResponseError };

  Annotation() = default;

  static Annotation labeled(Label value);
  static Annotation response_error(std::string reason);
  static Annotation missing() { return Annotation(); }

  Kind kind() const { return kind_; }
  bool is_labeled() const { return kind_ == Kind::Labeled; }
  bool is_error() const { return kind_ == Kind::ResponseError; }
  bool is_missing() const { return kind_ == Kind::Missing; }

  const Label& label() const;        // requires Labeled
  const std::string& reason() const;  // requires ResponseError

  bool operator==(const Annotation&) const = default;

 private:
  Kind kind_ = Kind::Missing;
  std::string text_;  // label or error reason
};

// Canonical ResponseError reasons. Only Transport is retried on resume;
// the others are content-based and final.
namespace error_reason {
inline constexpr std::string_view kMalformedJson = "malformed_json";
inline constexpr std::string_view kMissingKey = "missing_key";
inline constexpr std::string_view kUnknownLabel = "unknown_label";
inline constexpr std::string_view kRefusal = "refusal";
inline constexpr std::string_view kTransport = "transport";
}  // namespace error_reason

// Instances x annotators grid. Cells start out Missing.
class AnnotationMatrix {
 public:
  AnnotationMatrix(std::vector<std::string> instance_ids,
                   std::vector<std::string> annotator_ids);

  std::size_t instance_count() const { return instance_ids_.size(); }
  std::size_t annotator_count() const { return annotator_ids_.size(); }
  const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  const std::vector<std::string>& annotator_ids() const { return annotator_ids_; }

  std::optional<std::size_t> instance_index(std::string_view id) const;
  std::optional<std::size_t> annotator_index(std::string_view id) const;

  const Annotation& at(std::size_t instance, std::size_t annotator) const;
  void set(std::size_t instance, std::size_t annotator, Annotation value);

  bool operator==(const AnnotationMatrix&) const = default;

 private:
  std::size_t cell_index(std::size_t instance, std::size_t annotator) const;

  std::vector<std::string> instance_ids_;
  std::vector<std::string> annotator_ids_;
  std::unordered_map<std::string, std::size_t> instance_index_;
  std::unordered_map<std::string, std::size_t> annotator_index_;
  std::vector<Annotation> cells_;  // instance-major
};

// Point estimate with percentile-bootstrap bounds. lower <= upper always;
// the point itself may fall outside the interval in pathological cases.
struct EstimateWithCI {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double se = 0.0;
  int n_resamples = 0;
  double level = 0.0;

  bool operator==(const EstimateWithCI&) const = default;
};

// Returns the matrix untouched when every Labeled cell is in the schema;
// throws UnknownLabel / DuplicateId otherwise. Idempotent by construction.
const AnnotationMatrix& validate_matrix(const AnnotationMatrix& matrix,
                                        const LabelSchema& schema);

}  // namespace aicrowd
