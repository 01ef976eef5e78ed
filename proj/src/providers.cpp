#include <cmath>
#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "aicrowd/annotators.hpp"
#include "aicrowd/error.hpp"
#include "aicrowd/random.hpp"

namespace aicrowd {

namespace {

using nlohmann::json;

void validate_mock(const MockBehavior& behavior, const LabelSchema& schema) {
  const std::size_t k = schema.label_count();
  if (behavior.confusion.size() != k) {
    throw Error(ErrorCode::ConfigError,
                "mock confusion matrix must have one row per schema label");
  }
  for (const auto& row : behavior.confusion) {
    if (row.size() != k) {
      throw Error(ErrorCode::ConfigError, "mock confusion matrix must be square");
    }
    double sum = 0.0;
    for (double p : row) {
      if (p < 0.0) {
        throw Error(ErrorCode::ConfigError, "mock confusion entries must be >= 0");
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::ConfigError, "mock confusion rows must sum to 1");
    }
  }
  if (behavior.refusal_probability < 0.0 || behavior.refusal_probability > 1.0) {
    throw Error(ErrorCode::ConfigError, "mock refusal probability must lie in [0, 1]");
  }
}

// Deterministic annotator: every cell draws from a seed derived from the
// instance id alone, so results do not depend on query order or thread count.
class MockClient : public AnnotatorClient {
 public:
  MockClient(const AnnotatorSpec& spec, const Codebook& codebook)
      : schema_(codebook.schema()), behavior_(*spec.mock) {
    validate_mock(behavior_, schema_);
  }

  TransportResult complete(const AnnotationRequest& request) override {
    std::mt19937_64 rng(mix64(behavior_.seed ^ mix64(fnv1a64(request.instance_id))));
    if (uniform_unit(rng) < behavior_.refusal_probability) {
      return std::string(
          "I cannot assist with classifying this content. Please consult a "
          "domain expert.");
    }

    const std::size_t k = schema_.label_count();
    std::size_t truth;
    if (request.gold) {
      truth = schema_.index_of(*request.gold).value();
    } else {
      truth = static_cast<std::size_t>(fnv1a64(request.text) % k);
    }

    const std::vector<double>& row = behavior_.confusion[truth];
    const double u = uniform_unit(rng);
    double cumulative = 0.0;
    std::size_t drawn = k - 1;  // rounding fallback
    for (std::size_t c = 0; c < k; ++c) {
      cumulative += row[c];
      if (u < cumulative) {
        drawn = c;
        break;
      }
    }

    json reply;
    reply[schema_.variable_name()] = schema_.labels()[drawn];
    return reply.dump();
  }

 private:
  LabelSchema schema_;
  MockBehavior behavior_;
};

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash, possibly empty
};

SplitUrl split_base_url(const std::string& base_url) {
  const std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::ConfigError,
                "base_url '" + base_url + "' must include http:// or https://");
  }
  const std::size_t path_start = base_url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = base_url;
  } else {
    out.origin = base_url.substr(0, path_start);
    out.prefix = base_url.substr(path_start);
  }
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

TransportFailure failure_from(const httplib::Result& res) {
  if (res) {
    const int status = res->status;
    TransportErrorKind kind;
    if (status == 429) {
      kind = TransportErrorKind::RateLimit;
    } else if (status >= 500) {
      kind = TransportErrorKind::ServerError;
    } else {
      kind = TransportErrorKind::BadRequest;
    }
    return {kind, status, "HTTP status " + std::to_string(status)};
  }
  switch (res.error()) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
    case httplib::Error::Write:
      return {TransportErrorKind::Timeout, 0, httplib::to_string(res.error())};
    default:
      return {TransportErrorKind::Network, 0, httplib::to_string(res.error())};
  }
}

class HttpClientBase : public AnnotatorClient {
 public:
  HttpClientBase(const AnnotatorSpec& spec, std::string api_key)
      : spec_(spec), url_(split_base_url(spec.base_url)), api_key_(std::move(api_key)),
        http_(url_.origin) {
    http_.set_connection_timeout(std::chrono::milliseconds(spec.timeout_ms));
    http_.set_read_timeout(std::chrono::milliseconds(spec.timeout_ms));
    http_.set_write_timeout(std::chrono::milliseconds(spec.timeout_ms));
  }

 protected:
  AnnotatorSpec spec_;
  SplitUrl url_;
  std::string api_key_;
  httplib::Client http_;
};

// POST {base}/chat/completions with a chat body; reply text is
// choices[0].message.content.
class OpenAiCompatibleClient : public HttpClientBase {
 public:
  using HttpClientBase::HttpClientBase;

  TransportResult complete(const AnnotationRequest& request) override {
    json body;
    body["model"] = spec_.model;
    body["temperature"] = spec_.temperature;
    if (spec_.reasoning_effort == "low") body["reasoning_effort"] = "low";
    body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});

    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    httplib::Result res = http_.Post(url_.prefix + "/chat/completions", headers,
                                     body.dump(), "application/json");
    if (!res || res->status != 200) return failure_from(res);

    const json reply = json::parse(res->body, nullptr, false);
    if (!reply.is_discarded() && reply.contains("choices") && reply["choices"].is_array() &&
        !reply["choices"].empty()) {
      const json& message = reply["choices"][0];
      if (message.contains("message") && message["message"].contains("content") &&
          message["message"]["content"].is_string()) {
        return message["message"]["content"].get<std::string>();
      }
    }
    return TransportFailure{TransportErrorKind::ServerError, res->status,
                            "unparseable completion envelope"};
  }
};

// POST {base}/v1/messages with the messages body; reply text is
// content[0].text.
class AnthropicClient : public HttpClientBase {
 public:
  using HttpClientBase::HttpClientBase;

  TransportResult complete(const AnnotationRequest& request) override {
    json body;
    body["model"] = spec_.model;
    body["max_tokens"] = 1024;
    body["temperature"] = spec_.temperature;
    body["messages"] = json::array({{{"role", "user"}, {"content", request.prompt}}});

    httplib::Headers headers{{"x-api-key", api_key_},
                             {"anthropic-version", "2023-06-01"}};
    httplib::Result res =
        http_.Post(url_.prefix + "/v1/messages", headers, body.dump(), "application/json");
    if (!res || res->status != 200) return failure_from(res);

    const json reply = json::parse(res->body, nullptr, false);
    if (!reply.is_discarded() && reply.contains("content") && reply["content"].is_array() &&
        !reply["content"].empty() && reply["content"][0].contains("text") &&
        reply["content"][0]["text"].is_string()) {
      return reply["content"][0]["text"].get<std::string>();
    }
    return TransportFailure{TransportErrorKind::ServerError, res->status,
                            "unparseable completion envelope"};
  }
};

std::string require_api_key(const AnnotatorSpec& spec) {
  if (spec.provider_name.empty()) {
    throw Error(ErrorCode::ConfigError,
                "annotator '" + spec.id + "' needs provider_name for key lookup");
  }
  const std::string var = api_key_env_var(spec.provider_name);
  const char* key = std::getenv(var.c_str());
  if (!key || !*key) {
    throw Error(ErrorCode::ConfigError,
                "environment variable " + var + " is not set (annotator '" + spec.id + "')");
  }
  return key;
}

}  // namespace

std::unique_ptr<AnnotatorClient> make_client(const AnnotatorSpec& spec,
                                             const Codebook& codebook) {
  if (spec.temperature != 0.0) {
    throw Error(ErrorCode::ConfigError,
                "annotator '" + spec.id + "' must use temperature 0");
  }
  switch (spec.kind) {
    case ProviderKind::Mock:
      if (!spec.mock) {
        throw Error(ErrorCode::ConfigError,
                    "mock annotator '" + spec.id + "' lacks mock behavior");
      }
      return std::make_unique<MockClient>(spec, codebook);
    case ProviderKind::OpenAiCompatible:
    case ProviderKind::Anthropic: {
      if (spec.base_url.empty() || spec.model.empty()) {
        throw Error(ErrorCode::ConfigError,
                    "annotator '" + spec.id + "' needs base_url and model");
      }
      std::string key = require_api_key(spec);
      if (spec.kind == ProviderKind::OpenAiCompatible) {
        return std::make_unique<OpenAiCompatibleClient>(spec, std::move(key));
      }
      return std::make_unique<AnthropicClient>(spec, std::move(key));
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown provider kind");
}

}  // namespace aicrowd
