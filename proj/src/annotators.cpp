#include "aicrowd/annotators.hpp"

#include <atomic>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "aicrowd/error.hpp"
#include "aicrowd/log.hpp"
#include "aicrowd/random.hpp"
#include "aicrowd/reports.hpp"

namespace aicrowd {

std::string render_prompt(const Codebook& codebook, std::string_view text) {
  const std::string& tpl = codebook.prompt_template();
  const std::size_t pos = tpl.find(kTextPlaceholder);
  if (pos == std::string::npos) {
    // Unreachable for a constructed Codebook; kept for hand-built templates.
    throw Error(ErrorCode::PlaceholderMissing, "prompt template has no placeholder");
  }
  std::string prompt;
  prompt.reserve(tpl.size() + text.size());
  prompt.append(tpl, 0, pos);
  prompt.append(text);
  prompt.append(tpl, pos + kTextPlaceholder.size(), std::string::npos);
  return prompt;
}

std::string build_default_template(
    const LabelSchema& schema,
    const std::unordered_map<Label, std::string>& category_definitions,
    const std::string& boundary_notes) {
  std::string tpl =
      "You will have the role of a researcher that performs content analysis "
      "tasks.\n\n"
      "I need you to code a series of variables based on text instances. "
      "Next, I will describe you the variables.\n\n";
  tpl += "Variable \"" + schema.variable_name() +
         "\" which represents the variable to code. Answer with one of the "
         "following values: ";
  for (std::size_t i = 0; i < schema.labels().size(); ++i) {
    if (i) tpl += ", ";
    tpl += schema.labels()[i];
  }
  tpl += "\n";

  if (!category_definitions.empty()) {
    tpl += "\nClassification rules:\n\n";
    for (const Label& label : schema.labels()) {
      const auto it = category_definitions.find(label);
      if (it == category_definitions.end()) continue;
      tpl += "- Assign '" + label + "' if " + it->second + "\n";
    }
  }
  if (!boundary_notes.empty()) {
    tpl += "\n" + boundary_notes + "\n";
  }

  tpl +=
      "\nAll the variables are defined. This is the content to analyze "
      "(between triple quotes):\n\n```\n\"\"{text}\"\"\n```\n\n"
      "Return the response in JSON format with a dictionary with a key/value "
      "pair for each variable. Do not include any other content in the "
      "response.";
  return tpl;
}

namespace {

// First balanced {...} span starting at `start`, honoring strings and
// escapes; npos when the object never closes.
std::size_t balanced_object_end(std::string_view raw, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::string_view::npos;
}

}  // namespace

ParsedResponse parse_response_detail(std::string_view raw, const LabelSchema& schema) {
  using nlohmann::json;

  if (trim(raw).empty()) {
    return {Annotation::response_error(std::string(error_reason::kMalformedJson)), {}};
  }

  bool saw_brace = false;
  for (std::size_t start = raw.find('{'); start != std::string_view::npos;
       start = raw.find('{', start + 1)) {
    saw_brace = true;
    const std::size_t end = balanced_object_end(raw, start);
    if (end == std::string_view::npos) break;
    const json doc = json::parse(raw.substr(start, end - start + 1),
                                 /*cb=*/nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded() || !doc.is_object()) continue;

    const auto it = doc.find(schema.variable_name());
    if (it == doc.end()) {
      return {Annotation::response_error(std::string(error_reason::kMissingKey)), {}};
    }
    const std::string value =
        it->is_string() ? it->get<std::string>() : it->dump();

    if (const auto idx = schema.index_of(value)) {
      return {Annotation::labeled(schema.labels()[*idx]), {}};
    }
    if (const auto idx = schema.fold_index_of(value)) {
      return {Annotation::labeled(schema.labels()[*idx]),
              "case-normalized '" + value + "' to '" + schema.labels()[*idx] + "'"};
    }
    return {Annotation::response_error(std::string(error_reason::kUnknownLabel)), {}};
  }

  // No parseable object. Prose without any brace reads as a refusal; a
  // brace that never became valid JSON is a malformed response.
  if (saw_brace) {
    return {Annotation::response_error(std::string(error_reason::kMalformedJson)), {}};
  }
  return {Annotation::response_error(std::string(error_reason::kRefusal)), {}};
}

Annotation parse_response(std::string_view raw, const LabelSchema& schema) {
  return parse_response_detail(raw, schema).annotation;
}

const char* transport_error_name(TransportErrorKind kind) {
  switch (kind) {
    case TransportErrorKind::RateLimit: return "rate_limit";
    case TransportErrorKind::Timeout: return "timeout";
    case TransportErrorKind::ServerError: return "server_error";
    case TransportErrorKind::Network: return "network";
    case TransportErrorKind::BadRequest: return "bad_request";
  }
  return "network";
}

bool transport_retryable(TransportErrorKind kind) {
  return kind != TransportErrorKind::BadRequest;
}

const char* provider_kind_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::Mock: return "mock";
    case ProviderKind::OpenAiCompatible: return "openai_compatible";
    case ProviderKind::Anthropic: return "anthropic";
  }
  return "mock";
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "mock") return ProviderKind::Mock;
  if (name == "openai_compatible") return ProviderKind::OpenAiCompatible;
  if (name == "anthropic") return ProviderKind::Anthropic;
  throw Error(ErrorCode::ConfigError, "unknown provider kind '" + std::string(name) + "'");
}

MockBehavior symmetric_mock(std::uint64_t seed, double accuracy, std::size_t label_count,
                            double refusal_probability) {
  if (label_count < 2) {
    throw Error(ErrorCode::ConfigError, "symmetric mock needs at least two labels");
  }
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw Error(ErrorCode::ConfigError, "mock accuracy must lie in [0, 1]");
  }
  MockBehavior behavior;
  behavior.seed = seed;
  behavior.refusal_probability = refusal_probability;
  const double off = (1.0 - accuracy) / static_cast<double>(label_count - 1);
  behavior.confusion.assign(label_count, std::vector<double>(label_count, off));
  for (std::size_t i = 0; i < label_count; ++i) behavior.confusion[i][i] = accuracy;
  return behavior;
}

std::string api_key_env_var(std::string_view provider_name) {
  std::string var = "AICROWD_KEY_";
  for (char c : provider_name) {
    if (c >= 'a' && c <= 'z') {
      var += static_cast<char>(c - 'a' + 'A');
    } else if ((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) {
      var += c;
    } else {
      var += '_';
    }
  }
  return var;
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt,
                                        std::mt19937_64& rng) {
  double cap = static_cast<double>(policy.backoff_base_ms);
  for (int i = 0; i < attempt && cap < policy.backoff_cap_ms; ++i) cap *= 2.0;
  const auto bound = static_cast<std::uint64_t>(
      std::min(cap, static_cast<double>(policy.backoff_cap_ms)));
  return std::chrono::milliseconds(uniform_below(rng, bound + 1));
}

AnnotationOutcome annotate_instance(AnnotatorClient& client, const LabelSchema& schema,
                                    const AnnotationRequest& request,
                                    const RetryPolicy& policy, std::mt19937_64& rng,
                                    const Sleeper& sleep) {
  AnnotationOutcome outcome;
  const int max_attempts = std::max(policy.max_retries, 0) + 1;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const auto t0 = std::chrono::steady_clock::now();
    TransportResult result = client.complete(request);
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    outcome.latency_ms += latency;

    if (std::holds_alternative<std::string>(result)) {
      outcome.attempts.push_back({"ok", latency});
      outcome.raw_response = std::move(std::get<std::string>(result));
      ParsedResponse parsed = parse_response_detail(outcome.raw_response, schema);
      outcome.annotation = std::move(parsed.annotation);
      outcome.parse_note = std::move(parsed.note);
      return outcome;
    }

    const TransportFailure& failure = std::get<TransportFailure>(result);
    outcome.attempts.push_back({transport_error_name(failure.kind), latency});
    const bool last = attempt + 1 == max_attempts;
    if (last || !transport_retryable(failure.kind)) {
      outcome.annotation =
          Annotation::response_error(std::string(error_reason::kTransport));
      return outcome;
    }
    sleep(backoff_delay(policy, attempt, rng));
  }
  // max_attempts >= 1, so the loop always returns.
  outcome.annotation = Annotation::response_error(std::string(error_reason::kTransport));
  return outcome;
}

namespace {

void default_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

struct CellTask {
  std::size_t instance = 0;
};

}  // namespace

CrowdResult run_crowd(const std::vector<AnnotatorSpec>& roster, const Dataset& dataset,
                      const Codebook& codebook, const RunCrowdOptions& options) {
  if (roster.empty()) {
    throw Error(ErrorCode::ConfigError, "annotator roster is empty");
  }
  if (roster.size() < 10 || roster.size() > 15) {
    log_warn("roster has " + std::to_string(roster.size()) +
             " annotators; 10-15 is the recommended band");
  }

  std::vector<std::string> instance_ids;
  instance_ids.reserve(dataset.size());
  for (const Instance& inst : dataset.instances()) instance_ids.push_back(inst.id);
  std::vector<std::string> annotator_ids;
  annotator_ids.reserve(roster.size());
  for (const AnnotatorSpec& spec : roster) annotator_ids.push_back(spec.id);

  CrowdResult result{AnnotationMatrix(std::move(instance_ids), std::move(annotator_ids)),
                     {},
                     0};
  AnnotationMatrix& matrix = result.matrix;
  for (const AnnotatorSpec& spec : roster) {
    result.logs[spec.id].resize(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      result.logs[spec.id][i].instance_id = dataset.instances()[i].id;
    }
  }

  const ClientFactory factory =
      options.client_factory ? options.client_factory : ClientFactory(make_client);
  const Sleeper sleeper = options.sleeper ? options.sleeper : Sleeper(default_sleep);

  // Journal of completed cells, used both for crash-safe checkpoints and for
  // the final flush. Guarded by journal_mutex together with the flush clock.
  std::vector<CheckpointEntry> journal;
  std::mutex journal_mutex;
  std::size_t unflushed = 0;
  auto flush_checkpoint_locked = [&] {
    if (options.checkpoint_path.empty()) return;
    write_checkpoint(options.checkpoint_path, journal);
    unflushed = 0;
  };

  if (options.resume && !options.checkpoint_path.empty()) {
    std::vector<CheckpointEntry> entries;
    try {
      entries = read_checkpoint(options.checkpoint_path, codebook.schema());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IoError) throw;  // absent checkpoint: cold start
    }
    for (CheckpointEntry& entry : entries) {
      const auto i = matrix.instance_index(entry.instance_id);
      const auto a = matrix.annotator_index(entry.annotator_id);
      if (!i || !a) continue;  // stale row from another roster or sample
      if (entry.annotation.is_missing()) continue;
      if (entry.annotation.is_error() &&
          entry.annotation.reason() == error_reason::kTransport) {
        continue;  // transient failure: leave Missing so it is re-queried
      }
      matrix.set(*i, *a, entry.annotation);
      ResponseLogRow& row = result.logs[entry.annotator_id][*i];
      row.raw_response = entry.raw_response;
      if (entry.annotation.is_labeled()) row.parsed_label = entry.annotation.label();
      if (entry.annotation.is_error()) row.error_reason = entry.annotation.reason();
      row.attempts = entry.attempts;
      row.latency_ms = entry.latency_ms;
      journal.push_back(std::move(entry));
    }
    if (!journal.empty()) {
      log_info("resume: " + std::to_string(journal.size()) + " cells restored");
    }
  }

  for (std::size_t a = 0; a < roster.size(); ++a) {
    const AnnotatorSpec& spec = roster[a];
    std::vector<CellTask> tasks;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (matrix.at(i, a).is_missing()) tasks.push_back({i});
    }
    if (tasks.empty()) continue;

    RetryPolicy policy = options.retry;
    if (spec.max_retries >= 0) policy.max_retries = spec.max_retries;

    const std::size_t workers = std::min<std::size_t>(
        std::max(spec.max_in_flight, 1), tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
      try {
        const std::unique_ptr<AnnotatorClient> client = factory(spec, codebook);
        for (;;) {
          const std::size_t t = next.fetch_add(1);
          if (t >= tasks.size()) break;
          const std::size_t i = tasks[t].instance;
          const Instance& inst = dataset.instances()[i];

          AnnotationRequest request;
          request.instance_id = inst.id;
          request.text = inst.text;
          request.gold = inst.gold;
          request.prompt = render_prompt(codebook, inst.text);

          std::mt19937_64 rng(child_seed(mix64(options.seed ^ fnv1a64(spec.id)), i));
          AnnotationOutcome outcome = annotate_instance(
              *client, codebook.schema(), request, policy, rng, sleeper);

          matrix.set(i, a, outcome.annotation);  // preassigned slot, no race
          ResponseLogRow& row = result.logs[spec.id][i];
          row.raw_response = outcome.raw_response;
          if (outcome.annotation.is_labeled()) row.parsed_label = outcome.annotation.label();
          if (outcome.annotation.is_error()) row.error_reason = outcome.annotation.reason();
          row.attempts = static_cast<std::uint32_t>(outcome.attempts.size());
          row.latency_ms = outcome.latency_ms;

          std::lock_guard<std::mutex> lock(journal_mutex);
          result.queried_cells += 1;
          journal.push_back({inst.id, spec.id, outcome.annotation, outcome.raw_response,
                             row.attempts, outcome.latency_ms});
          if (++unflushed >= 64) flush_checkpoint_locked();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    };

    if (workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }

    {
      // Persist whatever completed, then surface any worker failure.
      std::lock_guard<std::mutex> lock(journal_mutex);
      flush_checkpoint_locked();
    }
    if (failure) std::rethrow_exception(failure);
  }

  return result;
}

}  // namespace aicrowd
