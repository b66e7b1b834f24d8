#include <thread>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "gateway/gateway.hpp"
#include "gateway/schema.hpp"
#include "httplib.h"

namespace photoart {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix, no trailing slash
};

Endpoint split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) fail(ErrorCode::kInvalidArgument, "base URL needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  Endpoint e{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
  while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
  return e;
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

OpenAiBackend::OpenAiBackend(OpenAiConfig config) : config_(std::move(config)) {
  if (config_.max_attempts < 1) config_.max_attempts = 1;
  if (!config_.sleep) {
    config_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

nlohmann::json OpenAiBackend::build_body(const BackendRequest& request) const {
  using json = nlohmann::json;
  json content = json::array();
  content.push_back({{"type", "text"}, {"text", request.user_prompt}});
  for (const auto& img : request.images) {
    content.push_back({{"type", "text"}, {"text", "[image: " + img.role + "]"}});
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:image/png;base64," + base64_encode(img.png)}}}});
  }
  json body = {{"model", config_.model},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens},
               {"messages", json::array({{{"role", "system"}, {"content", request.system_prompt}},
                                         {{"role", "user"}, {"content", content}}})}};
  if (!request.schema_id.empty()) {
    body["response_format"] = {
        {"type", "json_schema"},
        {"json_schema",
         {{"name", request.schema_id},
          {"schema", SchemaRegistry::builtin().resolved(request.schema_id)},
          {"strict", false}}}};
  }
  return body;
}

BackendResponse OpenAiBackend::complete(const BackendRequest& request) {
  const auto endpoint = split_url(config_.base_url);
  const auto body = build_body(request).dump();
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  auto backoff = config_.initial_backoff;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    if (attempt > 1) {
      config_.sleep(backoff);
      backoff *= 2;
    }
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(endpoint.prefix + "/chat/completions", headers, body, "application/json");
    const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 300);
      if (retryable_status(res->status)) continue;
      fail(ErrorCode::kBackend, last_error);
    }
    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
      last_error = "unexpected response body";
      continue;
    }
    BackendResponse out;
    const auto& message = reply["choices"][0].value("message", nlohmann::json::object());
    out.text = message.value("content", "");
    if (reply.contains("usage")) {
      out.usage.prompt_tokens = reply["usage"].value("prompt_tokens", 0);
      out.usage.completion_tokens = reply["usage"].value("completion_tokens", 0);
    }
    out.latency = latency;
    return out;
  }
  fail(ErrorCode::kBackend, "gave up after " + std::to_string(config_.max_attempts) +
                                " attempts: " + last_error);
}

}  // namespace photoart
