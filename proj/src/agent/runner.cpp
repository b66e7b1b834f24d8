#include "agent/runner.hpp"

#include <cstdlib>

#include "common/error.hpp"
#include "common/files.hpp"

namespace photoart {

namespace {

using json = nlohmann::json;

std::string env(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

template <class T>
void take(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kValidation, where + key + " has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (auto name : known) ok = ok || name == k;
    if (!ok) fail(ErrorCode::kValidation, "unknown config key " + where + k);
  }
}

}  // namespace

AppConfig config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kValidation, "config must be a JSON object");
  reject_unknown(j, {"host", "port", "store_root", "backend", "temperature", "max_iterations"}, "");
  AppConfig c;
  take(j, "host", c.host, "");
  take(j, "port", c.port, "");
  take(j, "store_root", c.store_root, "");
  take(j, "temperature", c.temperature, "");
  take(j, "max_iterations", c.max_iterations, "");
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    if (!b.is_object()) fail(ErrorCode::kValidation, "backend must be an object");
    reject_unknown(b, {"kind", "base_url", "model", "api_key_env", "transcript", "script"}, "backend.");
    take(b, "kind", c.backend.kind, "backend.");
    take(b, "base_url", c.backend.base_url, "backend.");
    take(b, "model", c.backend.model, "backend.");
    take(b, "api_key_env", c.backend.api_key_env, "backend.");
    take(b, "transcript", c.backend.transcript, "backend.");
    take(b, "script", c.backend.script, "backend.");
  }
  if (c.port < 0 || c.port > 65535) fail(ErrorCode::kValidation, "port out of range");
  if (!(c.temperature >= 0 && c.temperature <= 2)) fail(ErrorCode::kValidation, "temperature outside [0, 2]");
  if (c.max_iterations < 1) fail(ErrorCode::kValidation, "max_iterations must be at least 1");
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  const auto j = json::parse(read_file_text(path), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kParse, path.string() + ": not valid JSON");
  return config_from_json(j);
}

json to_json(const AppConfig& c) {
  return {{"host", c.host},
          {"port", c.port},
          {"store_root", c.store_root},
          {"temperature", c.temperature},
          {"max_iterations", c.max_iterations},
          {"backend",
           {{"kind", c.backend.kind},
            {"base_url", c.backend.base_url},
            {"model", c.backend.model},
            {"api_key_env", c.backend.api_key_env},
            {"transcript", c.backend.transcript},
            {"script", c.backend.script}}}};
}

void apply_env_overrides(AppConfig& c) {
  if (auto v = env("PHOTOART_BASE_URL"); !v.empty()) c.backend.base_url = v;
  if (auto v = env("PHOTOART_MODEL"); !v.empty()) c.backend.model = v;
  if (auto v = env("PHOTOART_API_KEY"); !v.empty()) c.backend.api_key = v;
}

std::shared_ptr<Backend> make_backend(const BackendConfig& c) {
  if (c.kind == "heuristic") return std::make_shared<HeuristicBackend>();
  if (c.kind == "script") {
    if (c.script.empty()) fail(ErrorCode::kValidation, "script backend needs a script path");
    return ScriptedBackend::from_file(c.script);
  }
  if (c.kind == "replay") {
    if (c.transcript.empty()) fail(ErrorCode::kValidation, "replay backend needs a transcript path");
    return std::make_shared<ReplayBackend>(Transcript::load(c.transcript));
  }
  if (c.kind == "openai_compatible") {
    OpenAiConfig oc;
    oc.base_url = c.base_url;
    oc.model = c.model;
    oc.api_key = !c.api_key.empty() ? c.api_key : env(c.api_key_env.c_str());
    return std::make_shared<OpenAiBackend>(std::move(oc));
  }
  fail(ErrorCode::kValidation, "unknown backend kind '" + c.kind + "'");
}

RunResult run_agent(std::shared_ptr<Backend> backend, ImageStore& images, const Image& source,
                    const RunOptions& options) {
  TranscriptMeta meta;
  meta.source_digest = image_digest(source);
  meta.instruction = options.instruction;
  meta.direction = options.direction.to_json();
  meta.max_iterations = options.max_iterations;
  meta.style = options.style;
  auto writer = std::make_shared<TranscriptWriter>(options.record, meta);
  Gateway gateway(std::make_shared<RecordingBackend>(std::move(backend), writer));

  AgentOptions agent_options;
  agent_options.max_iterations = options.max_iterations;
  agent_options.temperature = options.temperature;
  Orchestrator orchestrator(gateway, images, agent_options);

  EventLog log;
  if (options.on_event) log.set_listener(options.on_event);
  RunResult result;
  result.state = orchestrator.start(source, options.instruction, log);
  result.state.style_directives = options.style;
  orchestrator.run_to_completion(result.state, log, options.direction);
  result.events = log.all();
  result.transcript = writer->snapshot();
  return result;
}

ReplayResult replay_agent(std::string_view transcript_text, ImageStore& images, const Image& source,
                          bool verify, std::function<void(const Event&)> on_event) {
  ReplayResult out;
  if (verify) {
    for (auto& p : Transcript::integrity_problems(transcript_text)) out.divergences.push_back(std::move(p));
    if (!out.divergences.empty()) return out;
  }
  const auto transcript = Transcript::parse(transcript_text);
  if (image_digest(source) != transcript.meta.source_digest) {
    fail(ErrorCode::kDivergence, "source image digest " + image_digest(source).substr(0, 12) +
                                     " does not match the recording's " +
                                     transcript.meta.source_digest.substr(0, 12));
  }
  auto replay = std::make_shared<ReplayBackend>(transcript);
  RunOptions options;
  options.instruction = transcript.meta.instruction;
  options.direction = Direction::from_json(transcript.meta.direction);
  options.max_iterations = transcript.meta.max_iterations;
  options.temperature = 0.0;
  options.style = transcript.meta.style;
  options.on_event = std::move(on_event);
  out.run = run_agent(replay, images, source, options);
  if (!verify) return out;

  if (replay->consumed() != replay->size()) {
    out.divergences.push_back("replay consumed " + std::to_string(replay->consumed()) + " of " +
                              std::to_string(replay->size()) + " recorded exchanges");
  }
  // Compare what the run produced against the recorded payloads.
  std::vector<RetouchParams> recorded_params;
  std::vector<json> recorded_verdicts;
  for (const auto& e : transcript.entries) {
    if (e.malformed) continue;
    if (e.stage == "param_generation") recorded_params.push_back(from_json_value(e.payload.at("params")).params);
    if (e.stage == "reflection") recorded_verdicts.push_back(e.payload);
  }
  const auto& its = out.run.state.iterations;
  if (recorded_params.size() != its.size()) {
    out.divergences.push_back("recorded " + std::to_string(recorded_params.size()) + " parameter sets, produced " +
                              std::to_string(its.size()));
  }
  for (std::size_t i = 0; i < std::min(recorded_params.size(), its.size()); ++i) {
    const auto d = diff(recorded_params[i], its[i].params);
    if (!d.empty()) {
      out.divergences.push_back("iteration " + std::to_string(i + 1) + ": params differ at " + d.changes[0].field);
    }
  }
  for (std::size_t i = 0; i < std::min(recorded_verdicts.size(), its.size()); ++i) {
    const auto& v = its[i].verdict;
    const bool want = recorded_verdicts[i].at("satisfactory").get<bool>();
    if (!v || v->satisfactory != want || v->critique != recorded_verdicts[i].at("critique").get<std::string>()) {
      out.divergences.push_back("iteration " + std::to_string(i + 1) + ": verdict differs from the recording");
    }
  }
  // The recorded exchanges must be reproduced byte for byte; only the
  // decoding temperature is allowed to differ.
  auto rerun = out.run.transcript;
  for (std::size_t i = 0; i < std::min(rerun.entries.size(), transcript.entries.size()); ++i) {
    rerun.entries[i].temperature = transcript.entries[i].temperature;
  }
  if (rerun.serialize() != transcript.serialize()) {
    out.divergences.push_back("re-recorded transcript differs from the input");
  }
  return out;
}

}  // namespace photoart
