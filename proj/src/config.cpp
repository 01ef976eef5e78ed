#include "aicrowd/config.hpp"

#include <filesystem>

#include <json.hpp>

#include "aicrowd/csv.hpp"
#include "aicrowd/error.hpp"

namespace aicrowd {

namespace {

using nlohmann::json;

json parse_json_document(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::ConfigError, what + " is not valid JSON");
  }
  return doc;
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

void require_exists(const std::string& path, const std::string& role) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::ConfigError, role + " '" + path + "' does not exist");
  }
}

std::string get_string(const json& obj, const char* key, const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::ConfigError, context + " needs string field '" + key + "'");
  }
  return it->get<std::string>();
}

std::string get_string_or(const json& obj, const char* key, const std::string& fallback,
                          const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) {
    throw Error(ErrorCode::ConfigError, context + " field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

double get_number_or(const json& obj, const char* key, double fallback,
                     const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    throw Error(ErrorCode::ConfigError, context + " field '" + key + "' must be a number");
  }
  return it->get<double>();
}

std::int64_t get_integer_or(const json& obj, const char* key, std::int64_t fallback,
                            const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) {
    throw Error(ErrorCode::ConfigError, context + " field '" + key + "' must be an integer");
  }
  return it->get<std::int64_t>();
}

bool get_bool_or(const json& obj, const char* key, bool fallback, const std::string& context) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_boolean()) {
    throw Error(ErrorCode::ConfigError, context + " field '" + key + "' must be a boolean");
  }
  return it->get<bool>();
}

LabelSchema parse_schema(const json& node, const std::string& base_dir) {
  json obj = node;
  if (node.is_string()) {
    const std::string path = resolve_path(base_dir, node.get<std::string>());
    require_exists(path, "schema file");
    obj = parse_json_document(read_text_file(path), "schema file '" + path + "'");
  }
  if (!obj.is_object()) {
    throw Error(ErrorCode::ConfigError, "schema must be an object or a file path");
  }
  const auto labels_it = obj.find("labels");
  if (labels_it == obj.end() || !labels_it->is_array()) {
    throw Error(ErrorCode::ConfigError, "schema needs a 'labels' array");
  }
  std::vector<Label> labels;
  for (const json& label : *labels_it) {
    if (!label.is_string()) {
      throw Error(ErrorCode::ConfigError, "schema labels must be strings");
    }
    labels.push_back(label.get<std::string>());
  }
  return LabelSchema(get_string(obj, "variable_name", "schema"), std::move(labels));
}

MockBehavior parse_mock(const json& obj, const LabelSchema& schema,
                        const std::string& context) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::ConfigError, context + " mock must be an object");
  }
  const auto seed =
      static_cast<std::uint64_t>(get_integer_or(obj, "seed", 0, context + " mock"));
  const double refusal =
      get_number_or(obj, "refusal_probability", 0.0, context + " mock");

  if (obj.contains("confusion")) {
    const json& rows = obj["confusion"];
    if (!rows.is_array()) {
      throw Error(ErrorCode::ConfigError, context + " mock confusion must be an array");
    }
    MockBehavior behavior;
    behavior.seed = seed;
    behavior.refusal_probability = refusal;
    for (const json& row : rows) {
      if (!row.is_array()) {
        throw Error(ErrorCode::ConfigError, context + " mock confusion rows must be arrays");
      }
      std::vector<double> values;
      for (const json& v : row) {
        if (!v.is_number()) {
          throw Error(ErrorCode::ConfigError, context + " mock confusion entries must be numbers");
        }
        values.push_back(v.get<double>());
      }
      behavior.confusion.push_back(std::move(values));
    }
    return behavior;
  }

  const auto it = obj.find("accuracy");
  if (it == obj.end() || !it->is_number()) {
    throw Error(ErrorCode::ConfigError,
                context + " mock needs 'accuracy' or a 'confusion' matrix");
  }
  return symmetric_mock(seed, it->get<double>(), schema.label_count(), refusal);
}

AnnotatorSpec parse_annotator(const json& obj, const LabelSchema& schema) {
  if (!obj.is_object()) {
    throw Error(ErrorCode::ConfigError, "each annotator must be an object");
  }
  AnnotatorSpec spec;
  spec.id = get_string(obj, "id", "annotator");
  const std::string context = "annotator '" + spec.id + "'";
  spec.kind = parse_provider_kind(get_string_or(obj, "provider", "mock", context));
  spec.base_url = get_string_or(obj, "base_url", "", context);
  spec.model = get_string_or(obj, "model", "", context);
  spec.provider_name = get_string_or(obj, "provider_name", "", context);
  spec.temperature = get_number_or(obj, "temperature", 0.0, context);
  if (spec.temperature != 0.0) {
    throw Error(ErrorCode::ConfigError, context + " must keep temperature 0");
  }
  spec.reasoning_effort = get_string_or(obj, "reasoning_effort", "", context);
  if (spec.reasoning_effort == "none") spec.reasoning_effort.clear();
  if (!spec.reasoning_effort.empty() && spec.reasoning_effort != "low") {
    throw Error(ErrorCode::ConfigError, context + " reasoning_effort must be none or low");
  }
  spec.max_in_flight =
      static_cast<int>(get_integer_or(obj, "max_in_flight", 4, context));
  if (spec.max_in_flight < 1) {
    throw Error(ErrorCode::ConfigError, context + " max_in_flight must be positive");
  }
  spec.max_retries = static_cast<int>(get_integer_or(obj, "max_retries", -1, context));
  spec.timeout_ms = static_cast<int>(get_integer_or(obj, "timeout_ms", 30000, context));
  if (spec.timeout_ms < 1) {
    throw Error(ErrorCode::ConfigError, context + " timeout_ms must be positive");
  }
  if (obj.contains("mock")) {
    spec.mock = parse_mock(obj["mock"], schema, context);
  }
  if (spec.kind == ProviderKind::Mock && !spec.mock) {
    throw Error(ErrorCode::ConfigError, context + " is a mock but has no mock behavior");
  }
  return spec;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
  const json doc = parse_json_document(json_text, "config");
  if (!doc.is_object()) {
    throw Error(ErrorCode::ConfigError, "config must be a JSON object");
  }

  RunConfig cfg;

  const auto dataset_it = doc.find("dataset");
  if (dataset_it == doc.end() || !dataset_it->is_object()) {
    throw Error(ErrorCode::ConfigError, "config needs a 'dataset' object");
  }
  const json& dataset = *dataset_it;
  cfg.dataset_name = get_string(dataset, "name", "dataset");
  cfg.input_path = resolve_path(base_dir, get_string(dataset, "path", "dataset"));
  require_exists(cfg.input_path, "dataset file");
  if (dataset.contains("columns")) {
    const json& columns = dataset["columns"];
    cfg.columns.text = get_string_or(columns, "text", cfg.columns.text, "columns");
    cfg.columns.id = get_string_or(columns, "id", cfg.columns.id, "columns");
    cfg.columns.gold = get_string_or(columns, "gold", cfg.columns.gold, "columns");
  }
  const std::int64_t max_units =
      get_integer_or(dataset, "max_text_units", 4000, "dataset");
  if (max_units < 1) {
    throw Error(ErrorCode::ConfigError, "max_text_units must be positive");
  }
  cfg.max_text_units = static_cast<std::size_t>(max_units);
  if (dataset.contains("sample_size")) {
    const std::int64_t n = get_integer_or(dataset, "sample_size", 0, "dataset");
    if (n < 1) {
      throw Error(ErrorCode::ConfigError, "sample_size must be positive");
    }
    cfg.sample_size = static_cast<std::size_t>(n);
  }

  const auto schema_it = doc.find("schema");
  if (schema_it == doc.end()) {
    throw Error(ErrorCode::ConfigError, "config needs a 'schema'");
  }
  cfg.schema = parse_schema(*schema_it, base_dir);

  std::unordered_map<Label, std::string> definitions;
  std::string boundary_notes;
  std::string prompt_template;
  if (doc.contains("codebook")) {
    const json& codebook = doc["codebook"];
    if (!codebook.is_object()) {
      throw Error(ErrorCode::ConfigError, "codebook must be an object");
    }
    if (codebook.contains("category_definitions")) {
      const json& defs = codebook["category_definitions"];
      if (!defs.is_object()) {
        throw Error(ErrorCode::ConfigError, "category_definitions must be an object");
      }
      for (const auto& [label, text] : defs.items()) {
        if (!text.is_string()) {
          throw Error(ErrorCode::ConfigError, "category definitions must be strings");
        }
        definitions[label] = text.get<std::string>();
      }
    }
    boundary_notes = get_string_or(codebook, "boundary_notes", "", "codebook");
    if (codebook.contains("prompt_template_path")) {
      const std::string path = resolve_path(
          base_dir, get_string(codebook, "prompt_template_path", "codebook"));
      require_exists(path, "prompt template file");
      prompt_template = read_text_file(path);
    } else {
      prompt_template = get_string_or(codebook, "prompt_template", "", "codebook");
    }
  }
  if (prompt_template.empty()) {
    prompt_template = build_default_template(cfg.schema, definitions, boundary_notes);
  }
  try {
    cfg.codebook = Codebook(cfg.schema, std::move(prompt_template), std::move(definitions),
                            std::move(boundary_notes));
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }

  const auto annotators_it = doc.find("annotators");
  if (annotators_it == doc.end() || !annotators_it->is_array() || annotators_it->empty()) {
    throw Error(ErrorCode::ConfigError, "config needs a non-empty 'annotators' array");
  }
  for (const json& annotator : *annotators_it) {
    cfg.roster.push_back(parse_annotator(annotator, cfg.schema));
  }
  std::unordered_map<std::string, int> seen;
  for (const AnnotatorSpec& spec : cfg.roster) {
    if (spec.id == "MajorityVote") {
      throw Error(ErrorCode::ConfigError,
                  "annotator id 'MajorityVote' is reserved for the consensus row");
    }
    if (++seen[spec.id] > 1) {
      throw Error(ErrorCode::ConfigError, "duplicate annotator id '" + spec.id + "'");
    }
  }

  cfg.seed = static_cast<std::uint64_t>(get_integer_or(doc, "seed", 0, "config"));
  if (doc.contains("bootstrap")) {
    const json& bootstrap = doc["bootstrap"];
    cfg.bootstrap.n_resamples =
        static_cast<int>(get_integer_or(bootstrap, "n_resamples", 1000, "bootstrap"));
    cfg.bootstrap.level = get_number_or(bootstrap, "level", 0.95, "bootstrap");
    if (cfg.bootstrap.n_resamples < 2) {
      throw Error(ErrorCode::ConfigError, "bootstrap n_resamples must be at least 2");
    }
    if (!(cfg.bootstrap.level > 0.0 && cfg.bootstrap.level < 1.0)) {
      throw Error(ErrorCode::ConfigError, "bootstrap level must lie in (0, 1)");
    }
  }
  cfg.bootstrap.seed = cfg.seed;

  if (doc.contains("retry")) {
    const json& retry = doc["retry"];
    cfg.retry.max_retries =
        static_cast<int>(get_integer_or(retry, "max_retries", 3, "retry"));
    cfg.retry.backoff_base_ms =
        static_cast<int>(get_integer_or(retry, "backoff_base_ms", 250, "retry"));
    cfg.retry.backoff_cap_ms =
        static_cast<int>(get_integer_or(retry, "backoff_cap_ms", 4000, "retry"));
    if (cfg.retry.max_retries < 0 || cfg.retry.backoff_base_ms < 0 ||
        cfg.retry.backoff_cap_ms < cfg.retry.backoff_base_ms) {
      throw Error(ErrorCode::ConfigError, "retry policy values are out of range");
    }
  }

  cfg.gate_override = get_bool_or(doc, "gate_override", false, "config");
  cfg.output_dir =
      resolve_path(base_dir, get_string_or(doc, "output_dir", ".", "config"));
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  return parse_run_config(text, base_dir);
}

}  // namespace aicrowd
