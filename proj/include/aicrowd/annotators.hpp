#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <variant>

#include "aicrowd/core.hpp"
#include "aicrowd/dataset.hpp"

namespace aicrowd {

// ---------------------------------------------------------------------------
// Prompt rendering / response parsing
// ---------------------------------------------------------------------------

// Substitutes the instance text into the codebook template (the template is
// validated at construction to contain the placeholder exactly once).
std::string render_prompt(const Codebook& codebook, std::string_view text);

// Scaffold used when a config names a schema but no full template: role
// preamble, variable description with the closed value list, optional
// classification rules and boundary notes, the triple-quoted content block
// with the placeholder, and the JSON response contract.
std::string build_default_template(
    const LabelSchema& schema,
    const std::unordered_map<Label, std::string>& category_definitions,
    const std::string& boundary_notes);

struct ParsedResponse {
  Annotation annotation;  // Labeled or ResponseError, never Missing
  std::string note;       // non-empty when a lenient fallback was applied
};

// Extracts the first balanced JSON object from a raw model reply and reads
// schema.variable_name out of it. Unknown labels retry once with a unique
// case-insensitive match before giving up.
ParsedResponse parse_response_detail(std::string_view raw, const LabelSchema& schema);
Annotation parse_response(std::string_view raw, const LabelSchema& schema);

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

enum class TransportErrorKind {
  RateLimit,    // HTTP 429
  Timeout,      // no response in time
  ServerError,  // HTTP 5xx
  Network,      // connect/DNS/TLS failure
  BadRequest,   // HTTP 4xx other than 429; never retried
};

const char* transport_error_name(TransportErrorKind kind);
bool transport_retryable(TransportErrorKind kind);

struct TransportFailure {
  TransportErrorKind kind = TransportErrorKind::Network;
  int status = 0;  // HTTP status when one was received, else 0
  std::string detail;
};

// Either the raw completion text or a transport failure.
using TransportResult = std::variant<std::string, TransportFailure>;

struct AnnotationRequest {
  std::string instance_id;
  std::string text;
  std::optional<Label> gold;
  std::string prompt;
};

class AnnotatorClient {
 public:
  virtual ~AnnotatorClient() = default;
  virtual TransportResult complete(const AnnotationRequest& request) = 0;
};

// ---------------------------------------------------------------------------
// Annotator roster
// ---------------------------------------------------------------------------

enum class ProviderKind { Mock, OpenAiCompatible, Anthropic };

const char* provider_kind_name(ProviderKind kind);
ProviderKind parse_provider_kind(std::string_view name);

// Deterministic stand-in for a remote model. For each instance the "true"
// class is the gold label when present, otherwise a hash of the text; the
// emitted label is drawn from that row of the confusion matrix.
struct MockBehavior {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> confusion;  // K x K, rows sum to 1
  double refusal_probability = 0.0;
};

// Confusion matrix with `accuracy` on the diagonal and the remainder spread
// evenly across the other labels.
MockBehavior symmetric_mock(std::uint64_t seed, double accuracy, std::size_t label_count,
                            double refusal_probability = 0.0);

struct AnnotatorSpec {
  std::string id;
  ProviderKind kind = ProviderKind::Mock;
  std::string base_url;       // remote providers
  std::string model;          // remote providers
  std::string provider_name;  // selects the AICROWD_KEY_<PROVIDER> variable
  double temperature = 0.0;
  std::string reasoning_effort;  // "", "none" or "low"; forwarded when "low"
  int max_in_flight = 4;
  int max_retries = -1;  // -1 inherits the shared RetryPolicy
  int timeout_ms = 30000;
  std::optional<MockBehavior> mock;
};

// Environment variable that must hold the API key for a provider, e.g.
// "openai" -> "AICROWD_KEY_OPENAI".
std::string api_key_env_var(std::string_view provider_name);

using ClientFactory =
    std::function<std::unique_ptr<AnnotatorClient>(const AnnotatorSpec&, const Codebook&)>;

// Default factory: mock specs get the deterministic mock, remote specs get
// an HTTP client for their provider (throws ConfigError when the key
// variable is unset).
std::unique_ptr<AnnotatorClient> make_client(const AnnotatorSpec& spec, const Codebook& codebook);

// ---------------------------------------------------------------------------
// Retry / annotate one instance
// ---------------------------------------------------------------------------

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
  int max_retries = 3;  // additional attempts after the first
  int backoff_base_ms = 250;
  int backoff_cap_ms = 4000;
};

// Exponential backoff with full jitter: uniform in
// [0, min(cap, base * 2^attempt)].
std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt,
                                        std::mt19937_64& rng);

struct AttemptRecord {
  std::string outcome;  // "ok" or a transport error name
  double latency_ms = 0.0;
};

struct AnnotationOutcome {
  Annotation annotation = Annotation::missing();
  std::string raw_response;  // last completion text, empty on pure transport failure
  std::vector<AttemptRecord> attempts;
  double latency_ms = 0.0;  // summed over attempts
  std::string parse_note;
};

// Queries the client with retries for retryable transport failures only;
// content-level failures (malformed JSON, unknown label, refusal) are final
// on the first response.
AnnotationOutcome annotate_instance(AnnotatorClient& client, const LabelSchema& schema,
                                    const AnnotationRequest& request,
                                    const RetryPolicy& policy, std::mt19937_64& rng,
                                    const Sleeper& sleep);

// ---------------------------------------------------------------------------
// Full crowd run
// ---------------------------------------------------------------------------

struct ResponseLogRow {
  std::string instance_id;
  std::string raw_response;
  std::string parsed_label;  // empty on error
  std::string error_reason;  // empty on success
  std::uint32_t attempts = 0;
  double latency_ms = 0.0;
};

struct CrowdResult {
  AnnotationMatrix matrix;
  // annotator id -> rows in dataset instance order
  std::map<std::string, std::vector<ResponseLogRow>> logs;
  std::uint64_t queried_cells = 0;  // cells actually sent to a client
};

struct RunCrowdOptions {
  ClientFactory client_factory;  // defaults to make_client
  Sleeper sleeper;               // defaults to a real sleep
  RetryPolicy retry;
  std::uint64_t seed = 0;       // drives backoff jitter only
  std::string checkpoint_path;  // empty disables checkpointing
  bool resume = false;
};

// Labels every (instance, annotator) cell. Each annotator runs its own pool
// of up to spec.max_in_flight worker threads; every task writes a
// preassigned slot so results are independent of scheduling. With resume on,
// cells already recorded in the checkpoint are kept unless they failed at
// the transport level.
CrowdResult run_crowd(const std::vector<AnnotatorSpec>& roster, const Dataset& dataset,
                      const Codebook& codebook, const RunCrowdOptions& options = {});

}  // namespace aicrowd
