// photoart command line: engine application, histogram tooling, agent runs
// and transcript replay, and the HTTP service. Talks to the library only
// through the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "photoart/photoart.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes are part of the interface.
constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitBackend = 4;
constexpr int kExitDivergence = 5;

int exit_code(pa_status s) {
  switch (s) {
    case PA_OK: return kExitOk;
    case PA_ERR_INVALID_ARGUMENT:
    case PA_ERR_VALIDATION:
    case PA_ERR_PARSE:
    case PA_ERR_WRONG_STAGE: return kExitValidation;
    case PA_ERR_IO:
    case PA_ERR_NOT_FOUND: return kExitIo;
    case PA_ERR_BACKEND:
    case PA_ERR_MALFORMED_OUTPUT: return kExitBackend;
    case PA_ERR_DIVERGENCE: return kExitDivergence;
    case PA_ERR_INTERNAL: return kExitFailure;
  }
  return kExitFailure;
}

struct Logger {
  bool quiet = false;
  bool json_lines = false;

  void emit(const char* level, const std::string& message, const json& fields = json::object()) const {
    if (json_lines) {
      json line = fields;
      line["level"] = level;
      line["msg"] = message;
      std::cerr << line.dump() << '\n';
    } else {
      std::cerr << (std::string(level) == "error" ? "error: " : "") << message << '\n';
    }
  }
  void info(const std::string& message, const json& fields = json::object()) const {
    if (!quiet) emit("info", message, fields);
  }
  void error(const std::string& message, const json& fields = json::object()) const {
    emit("error", message, fields);
  }
};

Logger g_log;

// Thrown to unwind with a C API status; main() turns it into an exit code.
struct Failure {
  pa_status status;
  std::string message;
};

void check(pa_status s, const std::string& context) {
  if (s != PA_OK) throw Failure{s, context + ": " + pa_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { pa_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using ImageHandle = Handle<pa_image, pa_image_free>;
using ParamsHandle = Handle<pa_params, pa_params_free>;
using ConfigHandle = Handle<pa_config, pa_config_free>;
using AgentHandle = Handle<pa_agent, pa_agent_free>;
using ServiceHandle = Handle<pa_service, pa_service_free>;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{PA_ERR_IO, "cannot read " + path.string()};
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{PA_ERR_IO, "cannot write " + path.string()};
}

void load_image(const std::string& path, ImageHandle& image) { check(pa_image_load(path.c_str(), &image.p), path); }

// ---- apply ----

struct ApplyArgs {
  std::string params, input, output;
};

void run_apply(const ApplyArgs& a) {
  const auto text = read_text(a.params);
  ParamsHandle params;
  CString defaulted;
  check(pa_params_from_json(text.c_str(), &params.p, &defaulted.p), a.params);
  ImageHandle source, result;
  load_image(a.input, source);
  CString trace;
  check(pa_render(source.p, params.p, &result.p, &trace.p), "render");
  check(pa_image_save(result.p, a.output.c_str()), a.output);
  const auto missing = json::parse(defaulted.str());
  if (!missing.empty()) g_log.info(std::to_string(missing.size()) + " field(s) defaulted to identity", {{"defaulted", missing}});
  g_log.info("wrote " + a.output, {{"output", a.output}, {"trace", json::parse(trace.str())}});
}

// ---- histogram ----

struct HistogramArgs {
  std::string input, png;
  bool json_out = false;
};

void run_histogram(const HistogramArgs& a) {
  ImageHandle image;
  load_image(a.input, image);
  CString report;
  check(pa_histogram_json(image.p, &report.p), "histogram");
  // Without --png the report is the output.
  if (a.json_out || a.png.empty()) std::cout << json::parse(report.str()).dump(2) << '\n';
  if (!a.png.empty()) {
    ImageHandle plot;
    check(pa_histogram_plot(image.p, &plot.p), "histogram plot");
    check(pa_image_save(plot.p, a.png.c_str()), a.png);
    g_log.info("wrote " + a.png, {{"output", a.png}});
  }
}

// ---- agent ----

struct AgentArgs {
  std::string config, image, backend, transcript, script, record, out_dir, direction_text;
  std::optional<std::string> instruction;
  std::optional<int> max_iters, direction;
  std::optional<double> temperature;
  std::vector<std::string> style;
  bool verify = false;
};

void print_event(const char* event_json, void*) {
  const auto e = json::parse(event_json);
  if (g_log.json_lines) {
    if (!g_log.quiet) std::cerr << e.dump() << '\n';
    return;
  }
  const auto& d = e["data"];
  const auto type = e["type"].get<std::string>();
  std::string line = "[" + e["stage"].get<std::string>() + "] ";
  if (type == "stage_entered") return;
  if (type == "text_emitted") line += d.value("text", "");
  else if (type == "params_proposed") line += "params: " + d["diff"].dump();
  else if (type == "image_rendered") line += "rendered iteration " + std::to_string(e["iteration"].get<int>());
  else if (type == "verdict")
    line += std::string("verdict: ") + (d.value("satisfactory", false) ? "satisfactory" : "not satisfactory");
  else if (type == "done") line += "done (" + d.value("outcome", "") + ")";
  else if (type == "failed") line += "failed: " + d.value("error", "");
  else line += type;
  g_log.info(line);
}

void write_outputs(const pa_agent* agent, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{PA_ERR_IO, "cannot create " + dir.string() + ": " + ec.message()};

  CString state, events, transcript;
  check(pa_agent_state_json(agent, &state.p), "state");
  check(pa_agent_events_jsonl(agent, &events.p), "events");
  check(pa_agent_transcript_jsonl(agent, &transcript.p), "transcript");
  write_text(dir / "session.json", state.str() + "\n");
  write_text(dir / "events.jsonl", events.str());
  write_text(dir / "transcript.jsonl", transcript.str());

  const auto s = json::parse(state.str());
  for (int n = 0; n <= pa_agent_iteration_count(agent); ++n) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "iter_%02d", n);
    ImageHandle image, plot;
    check(pa_agent_iteration_image(agent, n, 0, &image.p), "iteration image");
    check(pa_agent_iteration_image(agent, n, 1, &plot.p), "iteration histogram");
    if (n > 0) {
      check(pa_image_save(image.p, (dir / (std::string(stem) + ".jpg")).string().c_str()), "save image");
      write_text(dir / (std::string(stem) + ".params.json"), s["iterations"][n - 1]["params"].dump(2) + "\n");
    }
    check(pa_image_save(plot.p, (dir / (std::string(stem) + ".histogram.png")).string().c_str()), "save histogram");
  }

  std::string summary = "outcome: " + s["outcome"].get<std::string>() + "\n";
  summary += "iterations: " + std::to_string(s["iterations"].size()) + "\n";
  for (const auto& it : s["iterations"]) {
    if (!it["verdict"].is_null())
      summary += "  " + std::to_string(it["index"].get<int>()) + ": " +
                 (it["verdict"]["satisfactory"].get<bool>() ? "satisfactory" : "not satisfactory") + ", " +
                 it["verdict"]["critique"].get<std::string>() + "\n";
  }
  summary += "\n" + s["summary"].get<std::string>() + "\n";
  write_text(dir / "summary.txt", summary);
  g_log.info("wrote results to " + dir.string(),
             {{"out_dir", dir.string()}, {"iterations", s["iterations"].size()}, {"outcome", s["outcome"]}});
}

void load_config(const std::string& path, ConfigHandle& config) {
  check(pa_config_load(path.empty() ? nullptr : path.c_str(), &config.p), path.empty() ? "config" : path);
}

void run_agent(const AgentArgs& a) {
  ConfigHandle config;
  load_config(a.config, config);
  json backend = json::object();
  if (!a.backend.empty()) backend["kind"] = a.backend;
  if (!a.transcript.empty()) backend["transcript"] = a.transcript;
  if (!a.script.empty()) backend["script"] = a.script;
  if (!backend.empty()) check(pa_config_patch(config.p, json{{"backend", backend}}.dump().c_str()), "backend");

  CString resolved;
  check(pa_config_to_json(config.p, &resolved.p), "config");
  const auto kind = json::parse(resolved.str())["backend"]["kind"].get<std::string>();
  if (kind == "replay" && !a.record.empty())
    throw Failure{PA_ERR_VALIDATION, "--record cannot be combined with the replay backend"};
  if (kind == "replay" && json::parse(resolved.str())["backend"]["transcript"].get<std::string>().empty())
    throw Failure{PA_ERR_VALIDATION, "the replay backend needs --transcript"};

  json options = json::object();
  if (a.instruction) options["instruction"] = *a.instruction;
  if (!a.style.empty()) options["style"] = a.style;
  if (!a.direction_text.empty()) options["direction"] = {{"text", a.direction_text}};
  else if (a.direction) options["direction"] = {{"approach_index", *a.direction}};
  if (a.max_iters) options["max_iterations"] = *a.max_iters;
  if (a.temperature) options["temperature"] = *a.temperature;
  if (!a.record.empty()) options["record"] = a.record;

  ImageHandle source;
  load_image(a.image, source);
  AgentHandle agent;
  check(pa_agent_run(config.p, source.p, options.dump().c_str(), print_event, nullptr, &agent.p), "agent run");
  write_outputs(agent.p, a.out_dir);
}

void run_replay(const AgentArgs& a) {
  ImageHandle source;
  load_image(a.image, source);
  AgentHandle agent;
  CString divergences;
  const auto status =
      pa_agent_replay(a.transcript.c_str(), source.p, a.verify ? 1 : 0, print_event, nullptr, &agent.p, &divergences.p);
  const std::string message = status == PA_OK ? "" : pa_last_error();
  if (agent.p && !a.out_dir.empty()) write_outputs(agent.p, a.out_dir);
  if (status == PA_ERR_DIVERGENCE) {
    for (const auto& d : json::parse(divergences.str())) g_log.error("divergence: " + d.get<std::string>());
  }
  if (status != PA_OK) throw Failure{status, "replay: " + message};
  if (a.verify) g_log.info("transcript verified", {{"verified", true}});
}

// ---- style ----

struct StyleArgs {
  std::string reference, params, record, config, backend, transcript, script;
};

void run_style(const StyleArgs& a) {
  if (!a.params.empty() && !a.record.empty())
    throw Failure{PA_ERR_VALIDATION, "--record needs a backend call; it does not apply with --params"};
  ConfigHandle config;
  load_config(a.config, config);
  json backend = json::object();
  if (!a.backend.empty()) backend["kind"] = a.backend;
  if (!a.transcript.empty()) backend["transcript"] = a.transcript;
  if (!a.script.empty()) backend["script"] = a.script;
  if (!backend.empty()) check(pa_config_patch(config.p, json{{"backend", backend}}.dump().c_str()), "backend");
  ImageHandle reference;
  load_image(a.reference, reference);
  ParamsHandle params;
  if (!a.params.empty()) check(pa_params_from_json(read_text(a.params).c_str(), &params.p, nullptr), a.params);
  CString directive;
  check(pa_style_parse(config.p, reference.p, params.p, a.record.empty() ? nullptr : a.record.c_str(), &directive.p),
        "style");
  std::cout << json::parse(directive.str()).dump(2) << '\n';
}

// ---- serve ----

struct ServeArgs {
  std::string config, host, store, backend;
  std::optional<int> port;
};

void run_serve(const ServeArgs& a) {
  ConfigHandle config;
  load_config(a.config, config);
  json patch = json::object();
  if (!a.host.empty()) patch["host"] = a.host;
  if (a.port) patch["port"] = *a.port;
  if (!a.store.empty()) patch["store_root"] = a.store;
  if (!a.backend.empty()) patch["backend"] = {{"kind", a.backend}};
  check(pa_config_patch(config.p, patch.dump().c_str()), "config");
  ServiceHandle service;
  check(pa_service_create(config.p, &service.p), "service");
  CString resolved;
  check(pa_config_to_json(config.p, &resolved.p), "config");
  const auto c = json::parse(resolved.str());
  g_log.info("serving on " + c["host"].get<std::string>() + ":" + std::to_string(c["port"].get<int>()),
             {{"host", c["host"]}, {"port", c["port"]}});
  check(pa_service_listen(service.p), "serve");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photoart: parameter-space photo retouching"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pa_version());
  app.add_flag("-q,--quiet", g_log.quiet, "Only print errors and requested output");
  app.add_flag("--json-logs", g_log.json_lines, "Log one JSON object per line on stderr");

  ApplyArgs apply_args;
  auto* apply = app.add_subcommand("apply", "Render parameters onto an image");
  apply->add_option("--params", apply_args.params, "Parameter JSON")->required();
  apply->add_option("input", apply_args.input, "Source image")->required();
  apply->add_option("output", apply_args.output, "Output image (.png, .jpg)")->required();

  HistogramArgs hist_args;
  auto* hist = app.add_subcommand("histogram", "Histogram report and tone findings");
  hist->add_option("input", hist_args.input, "Image")->required();
  hist->add_flag("--json", hist_args.json_out, "Print the report as JSON");
  hist->add_option("--png", hist_args.png, "Write the histogram plot");

  AgentArgs agent_args;
  auto* agent = app.add_subcommand("agent", "Agent sessions");
  agent->require_subcommand(1);
  auto* run = agent->add_subcommand("run", "Run a session to completion");
  run->add_option("--image", agent_args.image, "Source image")->required();
  run->add_option("--instruction", agent_args.instruction, "What the user wants");
  run->add_option("--config", agent_args.config, "Config file (same as the service)");
  run->add_option("--backend", agent_args.backend, "openai_compatible, heuristic, replay or script")
      ->check(CLI::IsMember({"openai_compatible", "heuristic", "replay", "script"}));
  run->add_option("--transcript", agent_args.transcript, "Transcript for the replay backend");
  run->add_option("--script", agent_args.script, "Scripted replies for the script backend");
  run->add_option("--record", agent_args.record, "Record the exchange to this JSONL file");
  run->add_option("--max-iters", agent_args.max_iters, "Reflection cap")->check(CLI::Range(1, 100));
  run->add_option("--temperature", agent_args.temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0));
  run->add_option("--direction", agent_args.direction, "Strategy to pick (1-3, default 1)")->check(CLI::Range(1, 3));
  run->add_option("--direction-text", agent_args.direction_text, "Free-text direction instead of a strategy");
  run->add_option("--style", agent_args.style, "Style directive text (repeatable)");
  run->add_option("--out-dir", agent_args.out_dir, "Output directory")->required();

  auto* replay = agent->add_subcommand("replay", "Re-execute a recorded session");
  replay->add_option("transcript", agent_args.transcript, "Transcript JSONL")->required();
  replay->add_option("--image", agent_args.image, "Source image")->required();
  replay->add_option("--out-dir", agent_args.out_dir, "Output directory");
  replay->add_flag("--verify", agent_args.verify, "Fail (exit 5) unless the run matches the recording");

  StyleArgs style_args;
  auto* style = app.add_subcommand("style", "Turn a reference image (and optional params) into a style directive");
  style->add_option("reference", style_args.reference, "Reference image")->required();
  style->add_option("--params", style_args.params, "Parameters the reference was edited with");
  style->add_option("--record", style_args.record, "Record the exchange to this JSONL file");
  style->add_option("--config", style_args.config, "Config file");
  style->add_option("--backend", style_args.backend, "Backend kind")
      ->check(CLI::IsMember({"openai_compatible", "heuristic", "replay", "script"}));
  style->add_option("--transcript", style_args.transcript, "Transcript for the replay backend");
  style->add_option("--script", style_args.script, "Scripted replies for the script backend");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", serve_args.config, "Config file");
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--port", serve_args.port, "Port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--store", serve_args.store, "Session store root");
  serve->add_option("--backend", serve_args.backend, "Backend kind")
      ->check(CLI::IsMember({"openai_compatible", "heuristic", "replay", "script"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*apply) run_apply(apply_args);
    else if (*hist) run_histogram(hist_args);
    else if (*run) run_agent(agent_args);
    else if (*replay) run_replay(agent_args);
    else if (*style) run_style(style_args);
    else if (*serve) run_serve(serve_args);
  } catch (const Failure& f) {
    g_log.error(f.message, {{"status", pa_status_name(f.status)}, {"exit_code", exit_code(f.status)}});
    return exit_code(f.status);
  } catch (const std::exception& e) {
    g_log.error(e.what());
    return kExitFailure;
  }
  return kExitOk;
}
