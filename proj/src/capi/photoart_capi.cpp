#include <cstdlib>
#include <cstring>
#include <new>

#include "agent/runner.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "engine/render.hpp"
#include "histogram/histogram.hpp"
#include "photoart/photoart.h"
#include "service/service.hpp"
#include "style/style_parser.hpp"

using nlohmann::json;
using namespace photoart;

struct pa_image {
  Image image;
};

struct pa_params {
  RetouchParams params;
};

struct pa_config {
  json settings;  // config_from_json layout
};

struct pa_agent {
  MemoryImageStore images;
  RunResult run;
};

struct pa_service {
  std::unique_ptr<Service> service;
};

namespace {

thread_local std::string g_last_error;

pa_status set_error(pa_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename F>
pa_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PA_OK;
  } catch (const Error& e) {
    return set_error(static_cast<pa_status>(static_cast<int>(e.code())), e.what());
  } catch (const json::exception& e) {
    return set_error(PA_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PA_ERR_INTERNAL, e.what());
  }
}

void require(bool condition, const char* what) {
  if (!condition) fail(ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

AppConfig resolve(const pa_config* config) {
  auto c = config_from_json(config ? config->settings : json::object());
  apply_env_overrides(c);
  return c;
}

std::function<void(const Event&)> forward(pa_event_fn fn, void* user) {
  if (!fn) return {};
  return [fn, user](const Event& e) { fn(e.to_json().dump().c_str(), user); };
}

// Unset options come from the config, or from the recording when the backend
// replays one, so a replayed run asks the same questions.
RunOptions run_options(const AppConfig& config, const char* options_json) {
  RunOptions o;
  o.max_iterations = config.max_iterations;
  o.temperature = config.temperature;
  if (config.backend.kind == "replay" && !config.backend.transcript.empty()) {
    const auto meta = Transcript::load(config.backend.transcript).meta;
    o.instruction = meta.instruction;
    if (!meta.direction.empty()) o.direction = Direction::from_json(meta.direction);
    o.max_iterations = meta.max_iterations;
    o.style = meta.style;
  }
  if (!options_json) return o;
  const auto j = json::parse(options_json);
  if (!j.is_object()) fail(ErrorCode::kValidation, "agent options must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "instruction") {
      o.instruction = value.get<std::string>();
    } else if (key == "direction") {
      o.direction = Direction::from_json(value);
    } else if (key == "max_iterations") {
      o.max_iterations = value.get<int>();
    } else if (key == "temperature") {
      o.temperature = value.get<double>();
    } else if (key == "style") {
      for (const auto& s : value) o.style.push_back(style_from_text(s.get<std::string>()).text);
    } else if (key == "record") {
      o.record = value.get<std::string>();
    } else {
      fail(ErrorCode::kValidation, "unknown agent option '" + key + "'");
    }
  }
  if (o.max_iterations < 1) fail(ErrorCode::kValidation, "max_iterations must be at least 1");
  if (!(o.temperature >= 0 && o.temperature <= 2)) fail(ErrorCode::kValidation, "temperature outside [0, 2]");
  return o;
}

}  // namespace

extern "C" {

const char* pa_version(void) { return "1.0.0"; }

const char* pa_status_name(pa_status status) {
  switch (status) {
    case PA_OK: return "ok";
    case PA_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PA_ERR_VALIDATION: return "validation";
    case PA_ERR_IO: return "io";
    case PA_ERR_BACKEND: return "backend";
    case PA_ERR_DIVERGENCE: return "divergence";
    case PA_ERR_PARSE: return "parse";
    case PA_ERR_WRONG_STAGE: return "wrong_stage";
    case PA_ERR_NOT_FOUND: return "not_found";
    case PA_ERR_MALFORMED_OUTPUT: return "malformed_output";
    case PA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pa_last_error(void) { return g_last_error.c_str(); }

void pa_string_free(char* s) { std::free(s); }

pa_status pa_image_load(const char* path, pa_image** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(path && out, "path and out are required");
    *out = new pa_image{load_image(path)};
  });
}

pa_status pa_image_decode(const uint8_t* data, size_t size, pa_image** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(data && out, "data and out are required");
    *out = new pa_image{decode_image({data, size})};
  });
}

pa_status pa_image_from_rgb(int width, int height, const uint8_t* rgb, pa_image** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(rgb && out && width > 0 && height > 0, "positive size, pixels and out are required");
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    *out = new pa_image{Image(width, height, std::vector<std::uint8_t>(rgb, rgb + n))};
  });
}

pa_status pa_image_save(const pa_image* image, const char* path) {
  return guarded([&] {
    require(image && path, "image and path are required");
    save_image(image->image, path);
  });
}

int pa_image_width(const pa_image* image) { return image ? image->image.width() : 0; }
int pa_image_height(const pa_image* image) { return image ? image->image.height() : 0; }
const uint8_t* pa_image_pixels(const pa_image* image) { return image ? image->image.data().data() : nullptr; }

pa_status pa_image_digest(const pa_image* image, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(image && out, "image and out are required");
    *out = dup_string(image_digest(image->image));
  });
}

void pa_image_free(pa_image* image) { delete image; }

pa_status pa_params_identity(pa_params** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(out, "out is required");
    *out = new pa_params{};
  });
}

pa_status pa_params_from_json(const char* text, pa_params** out, char** defaulted_json) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(text && out, "text and out are required");
    auto parsed = from_json(text);
    if (defaulted_json) *defaulted_json = dup_string(json(parsed.defaulted).dump());
    *out = new pa_params{parsed.params};
  });
}

pa_status pa_params_to_json(const pa_params* params, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(params && out, "params and out are required");
    *out = dup_string(to_json(params->params));
  });
}

pa_status pa_params_diff_json(const pa_params* from, const pa_params* to, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(from && to && out, "from, to and out are required");
    *out = dup_string(diff_to_json(diff(from->params, to->params)).dump());
  });
}

void pa_params_free(pa_params* params) { delete params; }

pa_status pa_render(const pa_image* source, const pa_params* params, pa_image** out, char** trace) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(source && params && out, "source, params and out are required");
    auto result = render(source->image, params->params);
    if (trace) {
      json stages = json::array();
      for (const auto& s : result.trace.stages)
        stages.push_back({{"stage", s.name}, {"summary", s.summary}, {"elapsed_us", s.elapsed.count()}});
      *trace = dup_string(stages.dump());
    }
    *out = new pa_image{std::move(result.image)};
  });
}

pa_status pa_histogram_json(const pa_image* image, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(image && out, "image and out are required");
    const auto report = compute_histogram(image->image);
    nlohmann::ordered_json j;
    j["report"] = to_json_value(report);
    j["findings"] = to_json_value(summarize_tone(report));
    *out = dup_string(j.dump());
  });
}

pa_status pa_histogram_plot(const pa_image* image, pa_image** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(image && out, "image and out are required");
    *out = new pa_image{render_histogram_image(compute_histogram(image->image))};
  });
}

pa_status pa_config_load(const char* path, pa_config** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(out, "out is required");
    const auto c = path ? load_config(path) : AppConfig{};
    *out = new pa_config{to_json(c)};
  });
}

pa_status pa_config_patch(pa_config* config, const char* patch_json) {
  return guarded([&] {
    require(config && patch_json, "config and patch are required");
    auto next = config->settings;
    next.merge_patch(json::parse(patch_json));
    config_from_json(next);  // validate before committing
    config->settings = std::move(next);
  });
}

pa_status pa_config_to_json(const pa_config* config, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(config && out, "config and out are required");
    *out = dup_string(config->settings.dump());
  });
}

void pa_config_free(pa_config* config) { delete config; }

pa_status pa_agent_run(const pa_config* config, const pa_image* source, const char* options_json,
                       pa_event_fn on_event, void* user, pa_agent** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(source && out, "source and out are required");
    const auto c = resolve(config);
    auto options = run_options(c, options_json);
    options.on_event = forward(on_event, user);
    auto agent = std::make_unique<pa_agent>();
    agent->run = run_agent(make_backend(c.backend), agent->images, source->image, options);
    *out = agent.release();
  });
}

pa_status pa_agent_replay(const char* transcript_path, const pa_image* source, int verify, pa_event_fn on_event,
                          void* user, pa_agent** out, char** divergences_json) {
  std::vector<std::string> divergences;
  auto status = guarded([&] {
    if (out) *out = nullptr;
    require(transcript_path && source && out, "transcript, source and out are required");
    const auto text = read_file_text(transcript_path);
    auto agent = std::make_unique<pa_agent>();
    try {
      auto result = replay_agent(text, agent->images, source->image, verify != 0, forward(on_event, user));
      agent->run = std::move(result.run);
      divergences = std::move(result.divergences);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kDivergence) divergences.push_back(e.what());
      throw;
    }
    *out = agent.release();
  });
  if (status == PA_OK && !divergences.empty()) {
    std::string joined;
    for (const auto& d : divergences) joined += (joined.empty() ? "" : "; ") + d;
    status = set_error(PA_ERR_DIVERGENCE, "replay diverged: " + joined);
  }
  if (divergences_json) *divergences_json = dup_string(json(divergences).dump());
  return status;
}

pa_status pa_agent_state_json(const pa_agent* agent, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(agent && out, "agent and out are required");
    *out = dup_string(to_json(agent->run.state).dump(1));
  });
}

pa_status pa_agent_events_jsonl(const pa_agent* agent, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(agent && out, "agent and out are required");
    std::string text;
    for (const auto& e : agent->run.events) text += e.to_json().dump() + "\n";
    *out = dup_string(text);
  });
}

pa_status pa_agent_transcript_jsonl(const pa_agent* agent, char** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(agent && out, "agent and out are required");
    *out = dup_string(agent->run.transcript.serialize());
  });
}

int pa_agent_iteration_count(const pa_agent* agent) {
  return agent ? static_cast<int>(agent->run.state.iterations.size()) : 0;
}

pa_status pa_agent_iteration_image(const pa_agent* agent, int n, int kind, pa_image** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(agent && out && (kind == 0 || kind == 1), "agent, out and kind 0/1 are required");
    const auto& s = agent->run.state;
    if (n < 0 || static_cast<std::size_t>(n) > s.iterations.size())
      fail(ErrorCode::kNotFound, "no iteration " + std::to_string(n));
    std::string digest;
    if (n == 0) {
      digest = kind == 0 ? s.source_digest : s.source_histogram_digest;
    } else {
      const auto& it = s.iterations[static_cast<std::size_t>(n) - 1];
      digest = kind == 0 ? it.image_digest : it.histogram_digest;
    }
    if (!agent->images.contains(digest)) fail(ErrorCode::kNotFound, "image not stored");
    *out = new pa_image{agent->images.get(digest)};
  });
}

void pa_agent_free(pa_agent* agent) { delete agent; }

pa_status pa_style_parse(const pa_config* config, const pa_image* reference, const pa_params* params,
                         const char* record_path, char** directive_json) {
  return guarded([&] {
    require(reference && directive_json, "reference and directive_json are required");
    StyleDirective d;
    if (params) {
      d = parse_reference_case(reference->image, params->params);
    } else {
      const auto c = resolve(config);
      auto backend = make_backend(c.backend);
      if (record_path) {
        TranscriptMeta meta;
        meta.source_digest = image_digest(reference->image);
        backend = std::make_shared<RecordingBackend>(backend, std::make_shared<TranscriptWriter>(record_path, meta));
      }
      Gateway gateway(backend);
      d = parse_reference_image(gateway, reference->image, c.temperature);
    }
    *directive_json = dup_string(json{{"source", style_source_name(d.source)}, {"text", d.text}}.dump());
  });
}

pa_status pa_service_create(const pa_config* config, pa_service** out) {
  return guarded([&] {
    if (out) *out = nullptr;
    require(out, "out is required");
    *out = new pa_service{std::make_unique<Service>(resolve(config))};
  });
}

pa_status pa_service_start(pa_service* service, int* port) {
  return guarded([&] {
    require(service, "service is required");
    service->service->start();
    if (port) *port = service->service->port();
  });
}

pa_status pa_service_listen(pa_service* service) {
  return guarded([&] {
    require(service, "service is required");
    service->service->listen();
  });
}

void pa_service_stop(pa_service* service) {
  if (service) service->service->stop();
}

void pa_service_free(pa_service* service) { delete service; }

}  // extern "C"
