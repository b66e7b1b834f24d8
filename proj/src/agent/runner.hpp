#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agent/events.hpp"
#include "agent/image_store.hpp"
#include "agent/orchestrator.hpp"
#include "agent/state.hpp"
#include "gateway/gateway.hpp"
#include "gateway/transcript.hpp"

namespace photoart {

struct BackendConfig {
  std::string kind = "heuristic";  // openai_compatible, heuristic, replay, script
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o";
  std::string api_key_env = "PHOTOART_API_KEY";
  std::string api_key;     // resolved from api_key_env when empty
  std::string transcript;  // replay input
  std::string script;      // scripted replies
};

struct AppConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store_root = "sessions";
  BackendConfig backend;
  double temperature = 0.7;
  int max_iterations = 5;
};

// Unknown keys are rejected so typos do not silently fall back to defaults.
AppConfig config_from_json(const nlohmann::json& value);
AppConfig load_config(const std::filesystem::path& path);
// Inverse of config_from_json; the resolved api_key is never written out.
nlohmann::json to_json(const AppConfig& config);
// PHOTOART_BASE_URL, PHOTOART_MODEL and PHOTOART_API_KEY override the file.
void apply_env_overrides(AppConfig& config);

std::shared_ptr<Backend> make_backend(const BackendConfig& config);

struct RunOptions {
  std::string instruction;
  Direction direction{1, ""};
  int max_iterations = 5;
  double temperature = 0.7;
  std::vector<std::string> style;
  std::filesystem::path record;  // empty: no transcript file
  std::function<void(const Event&)> on_event;
};

struct RunResult {
  SessionState state;
  std::vector<Event> events;
  Transcript transcript;  // what was exchanged, recorded or not
};

// Runs a whole session. Throws like Orchestrator::advance; the partial state
// is then lost to the caller except through on_event and the record file.
RunResult run_agent(std::shared_ptr<Backend> backend, ImageStore& images, const Image& source,
                    const RunOptions& options);

struct ReplayResult {
  RunResult run;
  std::vector<std::string> divergences;  // filled in verify mode
};

// Re-executes a recorded session. Source digest and every request must match
// the recording (Error(kDivergence) otherwise). With `verify`, also checks the
// file's integrity, that all entries were consumed, and that produced params
// and verdicts equal the recorded payloads.
ReplayResult replay_agent(std::string_view transcript_text, ImageStore& images, const Image& source,
                          bool verify, std::function<void(const Event&)> on_event = {});

}  // namespace photoart
