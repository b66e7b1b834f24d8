#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace photoart {

// Stage ids that issue model calls.
inline constexpr std::string_view kCallStages[] = {
    "content_description", "strategy_proposal", "final_plan", "tone_analysis",
    "param_generation",    "reflection",        "summary",    "style_parse"};

bool is_call_stage(std::string_view stage);

struct ImageAttachment {
  std::string role;    // source, current, histogram or reference
  std::string digest;  // image_digest() of the decoded pixels
  std::vector<std::uint8_t> png;
};

struct BackendRequest {
  std::string stage;
  int iteration = 0;  // 0 outside the refinement loop
  std::string system_prompt;
  std::string user_prompt;
  std::vector<ImageAttachment> images;
  std::string schema_id;
  double temperature = 0.7;
  int max_tokens = 2048;
  // Structured inputs the prompt was built from (findings, previous params,
  // iteration bounds). Offline backends read these instead of the prose.
  nlohmann::json context = nlohmann::json::object();
};

// Throws Error(kInvalidArgument) when the request breaks its invariants.
void validate_request(const BackendRequest& request);

/// Binds a recorded response to the request that produced it. Covers stage,
/// iteration, schema, both prompts, image digests and context; temperature is
/// left out so a recording can be replayed at any temperature.
std::string request_digest(const BackendRequest& request);

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

struct BackendResponse {
  std::string text;
  nlohmann::json payload;  // parsed structured output, null when unparseable
  bool malformed = false;
  std::string error;  // validator messages when malformed
  TokenUsage usage;
  std::chrono::milliseconds latency{0};
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Raw exchange; schema checking happens in Gateway.
  virtual BackendResponse complete(const BackendRequest& request) = 0;
};

/// Fills payload/malformed/error of `response` by parsing its text and
/// validating against the request's schema plus the stage's semantic rules.
void check_response(const BackendRequest& request, BackendResponse& response);

class Gateway {
 public:
  explicit Gateway(std::shared_ptr<Backend> backend);

  // Validated structured completion. A malformed reply gets one repair
  // re-prompt carrying the validator messages; a second malformed reply throws
  // Error(kMalformedOutput). Transport failures surface as Error(kBackend).
  BackendResponse complete(const BackendRequest& request);

  Backend& backend() { return *backend_; }

 private:
  std::shared_ptr<Backend> backend_;
};

// Deterministic rule-based stand-in for a vision-language model. Output is a
// pure function of (stage, context).
class HeuristicBackend : public Backend {
 public:
  std::string name() const override { return "heuristic"; }
  BackendResponse complete(const BackendRequest& request) override;

  static nlohmann::json respond(std::string_view stage, const nlohmann::json& context);
};

/// Per-stage queues of canned replies; the last reply of a queue repeats once
/// it is exhausted. Stages absent from the script fall back to the heuristic.
/// Script form: {"stages": {"reflection": [<payload object> | "<raw text>", ...]}}
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(nlohmann::json script);
  static std::shared_ptr<ScriptedBackend> from_file(const std::string& path);

  std::string name() const override { return "script"; }
  BackendResponse complete(const BackendRequest& request) override;

 private:
  std::map<std::string, std::vector<nlohmann::json>, std::less<>> queues_;
  std::map<std::string, std::size_t, std::less<>> cursor_;
};

struct OpenAiConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key;
  std::chrono::seconds timeout{120};
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  // Injectable for tests.
  std::function<void(std::chrono::milliseconds)> sleep;
};

/// Chat-completions client with image parts and a JSON-schema response format.
class OpenAiBackend : public Backend {
 public:
  explicit OpenAiBackend(OpenAiConfig config);
  std::string name() const override { return "openai_compatible"; }
  BackendResponse complete(const BackendRequest& request) override;

  nlohmann::json build_body(const BackendRequest& request) const;

 private:
  OpenAiConfig config_;
};

}  // namespace photoart
