#include "gateway/gateway.hpp"

#include <algorithm>
#include <cctype>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "gateway/schema.hpp"
#include "params/params.hpp"

namespace photoart {

namespace {

// Strips a ```json fence some models wrap around structured replies.
std::string_view unfence(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.starts_with("```") && text.ends_with("```") && text.size() >= 6) {
    text.remove_suffix(3);
    text.remove_prefix(text.find('\n') == std::string_view::npos ? 3 : text.find('\n') + 1);
    text = trim(text);
  }
  return text;
}

std::vector<std::string> semantic_errors(std::string_view stage, const nlohmann::json& payload) {
  std::vector<std::string> errors;
  if (stage == "reflection") {
    const bool ok = payload.value("satisfactory", false);
    const auto directives = payload.value("directives", nlohmann::json::array());
    if (ok && !directives.empty()) errors.push_back("/directives: must be empty when satisfactory");
    for (const auto& d : directives) {
      const auto field = d.value("field", "");
      if (!field_index(field)) errors.push_back("/directives: unknown parameter field '" + field + "'");
    }
  } else if (stage == "param_generation") {
    try {
      from_json_value(payload.at("params"));
    } catch (const Error& e) {
      errors.push_back(std::string("/params: ") + e.what());
    }
  }
  return errors;
}

}  // namespace

bool is_call_stage(std::string_view stage) {
  return std::find(std::begin(kCallStages), std::end(kCallStages), stage) != std::end(kCallStages);
}

void validate_request(const BackendRequest& r) {
  if (!is_call_stage(r.stage)) fail(ErrorCode::kInvalidArgument, "unknown stage '" + r.stage + "'");
  if (r.system_prompt.empty() && r.user_prompt.empty()) {
    fail(ErrorCode::kInvalidArgument, "request has no prompt");
  }
  if (!r.schema_id.empty() && !SchemaRegistry::builtin().contains(r.schema_id)) {
    fail(ErrorCode::kInvalidArgument, "unregistered schema '" + r.schema_id + "'");
  }
  if (!(r.temperature >= 0.0 && r.temperature <= 2.0)) {
    fail(ErrorCode::kInvalidArgument, "temperature outside [0, 2]");
  }
  if (r.max_tokens <= 0) fail(ErrorCode::kInvalidArgument, "max_tokens must be positive");
  for (const auto& img : r.images) {
    if (img.role != "source" && img.role != "current" && img.role != "histogram" &&
        img.role != "reference") {
      fail(ErrorCode::kInvalidArgument, "unknown image role '" + img.role + "'");
    }
  }
}

std::string request_digest(const BackendRequest& r) {
  nlohmann::json images = nlohmann::json::object();
  for (const auto& img : r.images) images[img.role] = img.digest;
  const nlohmann::json canonical = {{"stage", r.stage},          {"iteration", r.iteration},
                                    {"schema", r.schema_id},     {"system", r.system_prompt},
                                    {"user", r.user_prompt},     {"images", images},
                                    {"context", r.context}};
  return sha256_hex(canonical.dump());
}

void check_response(const BackendRequest& request, BackendResponse& response) {
  response.malformed = false;
  response.error.clear();
  if (request.schema_id.empty()) return;
  response.payload = nlohmann::json::parse(unfence(response.text), nullptr, false);
  std::vector<std::string> errors;
  if (response.payload.is_discarded()) {
    response.payload = nullptr;
    errors.push_back("reply is not valid JSON");
  } else {
    errors = SchemaRegistry::builtin().validate(request.schema_id, response.payload);
    if (errors.empty()) errors = semantic_errors(request.stage, response.payload);
  }
  if (!errors.empty()) {
    response.malformed = true;
    for (const auto& e : errors) response.error += (response.error.empty() ? "" : "; ") + e;
  }
}

Gateway::Gateway(std::shared_ptr<Backend> backend) : backend_(std::move(backend)) {
  if (!backend_) fail(ErrorCode::kInvalidArgument, "gateway needs a backend");
}

BackendResponse Gateway::complete(const BackendRequest& request) {
  validate_request(request);
  auto response = backend_->complete(request);
  check_response(request, response);
  if (!response.malformed) return response;

  BackendRequest repair = request;
  repair.user_prompt += "\n\nYour previous reply was rejected: " + response.error +
                        "\nReply again with only a JSON object that matches the schema.";
  auto second = backend_->complete(repair);
  check_response(repair, second);
  if (second.malformed) {
    fail(ErrorCode::kMalformedOutput,
         "stage " + request.stage + ": malformed output after repair: " + second.error);
  }
  return second;
}

ScriptedBackend::ScriptedBackend(nlohmann::json script) {
  if (!script.is_object() || !script.contains("stages") || !script["stages"].is_object()) {
    fail(ErrorCode::kParse, "script needs a \"stages\" object");
  }
  for (const auto& [stage, replies] : script["stages"].items()) {
    if (!is_call_stage(stage)) fail(ErrorCode::kParse, "script names unknown stage '" + stage + "'");
    if (!replies.is_array() || replies.empty()) {
      fail(ErrorCode::kParse, "script stage '" + stage + "' needs a non-empty array");
    }
    queues_[stage] = replies.get<std::vector<nlohmann::json>>();
  }
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::string& path) {
  const auto text = read_file_text(path);
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kParse, path + ": not valid JSON");
  return std::make_shared<ScriptedBackend>(std::move(j));
}

BackendResponse ScriptedBackend::complete(const BackendRequest& request) {
  auto it = queues_.find(request.stage);
  if (it == queues_.end()) {
    BackendResponse r;
    r.text = HeuristicBackend::respond(request.stage, request.context).dump();
    return r;
  }
  auto& pos = cursor_[request.stage];
  const auto& reply = it->second[std::min(pos, it->second.size() - 1)];
  ++pos;
  BackendResponse r;
  r.text = reply.is_string() ? reply.get<std::string>() : reply.dump();
  return r;
}

}  // namespace photoart
