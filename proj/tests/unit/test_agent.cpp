#include <set>

#include "agent/orchestrator.hpp"
#include "agent/runner.hpp"
#include "common/error.hpp"
#include "doctest.h"
#include "engine/render.hpp"
#include "style/style_parser.hpp"

using namespace photoart;
using json = nlohmann::json;

namespace {

Image solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> px;
  for (int i = 0; i < w * h; ++i) px.insert(px.end(), {r, g, b});
  return Image(w, h, std::move(px));
}

// Smooth gradient with mean well below 96/255.
Image dark_scene() {
  Image img(64, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) {
      auto* p = img.pixel(x, y);
      p[0] = static_cast<std::uint8_t>(10 + x / 2);
      p[1] = static_cast<std::uint8_t>(12 + y / 2);
      p[2] = static_cast<std::uint8_t>(20 + (x + y) / 4);
    }
  return img;
}

std::shared_ptr<Backend> always_unsatisfied() {
  return std::make_shared<ScriptedBackend>(json::parse(R"({"stages":{"reflection":[
    {"satisfactory":false,"critique":"Still not right.","directives":[{"field":"basic.contrast","direction":"increase"}]}
  ]}})"));
}

struct Capture : Backend {
  std::shared_ptr<Backend> inner = std::make_shared<HeuristicBackend>();
  std::vector<BackendRequest> seen;
  std::string name() const override { return "capture"; }
  BackendResponse complete(const BackendRequest& r) override {
    seen.push_back(r);
    return inner->complete(r);
  }
};

}  // namespace

TEST_CASE("heuristic run on uniform gray finishes after one iteration") {
  MemoryImageStore store;
  const auto result = run_agent(std::make_shared<HeuristicBackend>(), store, solid(32, 32, 128, 128, 128), {});
  CHECK(result.state.stage == Stage::kDone);
  CHECK(result.state.iterations.size() == 1);
  CHECK(result.state.outcome == "satisfactory");
  CHECK(store.contains(result.state.iterations[0].image_digest));
  CHECK(result.state.iterations[0].params.basic.contrast == 20);
  CHECK(!result.state.summary.empty());
}

TEST_CASE("dark image gets brightened and terminates") {
  MemoryImageStore store;
  const auto img = dark_scene();
  REQUIRE(compute_histogram(img).pooled_mean < 96.0 / 255.0);
  const auto result = run_agent(std::make_shared<HeuristicBackend>(), store, img, {});
  CHECK(result.state.stage == Stage::kDone);
  CHECK(result.state.iterations.front().params.basic.exposure >= 0.8);
  CHECK(result.state.iterations.size() <= 5);
}

TEST_CASE("always-unsatisfied backend stops exactly at the cap") {
  for (int cap : {1, 3, 5}) {
    MemoryImageStore store;
    RunOptions opt;
    opt.max_iterations = cap;
    const auto result = run_agent(always_unsatisfied(), store, dark_scene(), opt);
    CHECK(result.state.stage == Stage::kDone);
    CHECK(result.state.iterations.size() == static_cast<std::size_t>(cap));
    CHECK(result.state.outcome == "cap_reached");
    int verdicts = 0;
    for (const auto& e : result.events) verdicts += e.type == "verdict";
    CHECK(verdicts == cap);
  }
}

TEST_CASE("every logged transition is an edge and every stage explains itself") {
  MemoryImageStore store;
  RunOptions opt;
  opt.max_iterations = 3;
  const auto result = run_agent(always_unsatisfied(), store, dark_scene(), opt);
  for (const auto& [from, to] : observed_transitions(result.events)) {
    CHECK_MESSAGE(is_edge(from, to), stage_name(from), " -> ", stage_name(to));
  }
  std::set<std::string> entered, explained;
  for (const auto& e : result.events) {
    if (e.type == "stage_entered") entered.insert(e.stage);
    if (e.type == "text_emitted" && !e.data["text"].get<std::string>().empty()) explained.insert(e.stage);
  }
  for (const auto& s : entered) {
    if (s == "done") continue;
    CHECK_MESSAGE(explained.count(s) == 1, s);
  }
  for (std::size_t i = 0; i < result.events.size(); ++i) CHECK(result.events[i].seq == i + 1);
}

TEST_CASE("direction handling") {
  MemoryImageStore store;
  auto capture = std::make_shared<Capture>();
  Gateway gateway(capture);
  Orchestrator orch(gateway, store, {});
  EventLog log;
  auto s = orch.start(solid(8, 8, 90, 100, 110), "vintage black-and-white", log);
  CHECK(s.stage == Stage::kContentDescription);
  CHECK(s.instruction == "vintage black-and-white");
  CHECK_THROWS_AS(orch.inject_direction(s, {2, ""}, log), Error);
  orch.advance(s, log);
  orch.advance(s, log);
  CHECK(s.stage == Stage::kAwaitUserDirection);
  CHECK(s.approaches.size() == 3);
  try {
    orch.advance(s, log);
    FAIL("advance must refuse while awaiting direction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kWrongStage);
  }
  CHECK_THROWS_AS(orch.inject_direction(s, {4, ""}, log), Error);
  orch.inject_direction(s, {std::nullopt, "make it moodier"}, log);
  CHECK(s.stage == Stage::kFinalPlan);
  orch.advance(s, log);
  CHECK(capture->seen.back().stage == "final_plan");
  CHECK(capture->seen.back().user_prompt.find("make it moodier") != std::string::npos);
  CHECK(capture->seen.back().user_prompt.find("vintage black-and-white") != std::string::npos);
  orch.advance(s, log);  // tone analysis
  orch.advance(s, log);  // params
  CHECK(s.stage == Stage::kRender);
  try {
    orch.inject_direction(s, {1, ""}, log);
    FAIL("direction must be refused at render");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kWrongStage);
  }
}

TEST_CASE("picking approach two reaches the plan") {
  MemoryImageStore store;
  RunOptions opt;
  opt.direction = {2, ""};
  const auto result = run_agent(std::make_shared<HeuristicBackend>(), store, solid(8, 8, 128, 128, 128), opt);
  CHECK(result.state.plan.find("Approach 2") == 0);
}

TEST_CASE("start rejects empty images") {
  MemoryImageStore store;
  Gateway gateway(std::make_shared<HeuristicBackend>());
  Orchestrator orch(gateway, store, {});
  EventLog log;
  CHECK_THROWS_AS(orch.start(Image{}, "", log), Error);
  CHECK(log.size() == 0);
}

TEST_CASE("backend failure moves the session to Failed") {
  MemoryImageStore store;
  auto script = std::make_shared<ScriptedBackend>(json::parse(R"({"stages":{"tone_analysis":["garbage"]}})"));
  try {
    run_agent(script, store, solid(8, 8, 128, 128, 128), {});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMalformedOutput);
  }
  Gateway gateway(script);
  Orchestrator orch(gateway, store, {});
  EventLog log;
  auto s = orch.start(solid(8, 8, 128, 128, 128), "", log);
  CHECK_THROWS(orch.run_to_completion(s, log, {1, ""}));
  CHECK(s.stage == Stage::kFailed);
  CHECK(s.failure.find("tone_analysis") == 0);
  CHECK(log.all().back().type == "failed");
  CHECK(log.closed());
}

TEST_CASE("session snapshot round trip") {
  MemoryImageStore store;
  RunOptions opt;
  opt.max_iterations = 2;
  opt.instruction = "keep it natural";
  const auto result = run_agent(always_unsatisfied(), store, dark_scene(), opt);
  const auto j = to_json(result.state);
  const auto back = session_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.iterations[1].report == result.state.iterations[1].report);
  auto broken = j;
  broken["stage"] = "sideways";
  CHECK_THROWS_AS(session_from_json(broken), Error);
}

TEST_CASE("record, replay and verify") {
  MemoryImageStore store;
  RunOptions opt;
  opt.max_iterations = 3;
  const auto img = dark_scene();
  const auto recorded = run_agent(std::make_shared<HeuristicBackend>(), store, img, opt);
  const auto text = recorded.transcript.serialize();

  MemoryImageStore store2;
  const auto replayed = replay_agent(text, store2, img, true);
  CHECK(replayed.divergences.empty());
  CHECK(to_json(replayed.run.state)["iterations"] == to_json(recorded.state)["iterations"]);

  // wrong source image
  CHECK_THROWS_AS(replay_agent(text, store2, solid(8, 8, 1, 2, 3), true), Error);

  // an edited parameter value with a recomputed checksum still diverges
  auto t = Transcript::parse(text);
  for (auto& e : t.entries) {
    if (e.stage == "param_generation") {
      e.payload["params"]["basic"]["exposure"] = 0.1;
      e.text = e.payload.dump();
      break;
    }
  }
  bool diverged = false;
  try {
    diverged = !replay_agent(t.serialize(), store2, img, true).divergences.empty();
  } catch (const Error& e) {
    diverged = e.code() == ErrorCode::kDivergence;
  }
  CHECK(diverged);
}

TEST_CASE("style parser") {
  Gateway g(std::make_shared<HeuristicBackend>());
  const auto dark_cool = parse_reference_image(g, solid(16, 16, 20, 40, 90));
  CHECK(dark_cool.source == StyleSource::kReferenceImage);
  CHECK(dark_cool.text.find("dark") != std::string::npos);
  CHECK(dark_cool.text.find("cool") != std::string::npos);
  CHECK(dark_cool.text.size() <= kMaxDirectiveLength);
  CHECK_THROWS_AS(parse_reference_image(g, std::span<const std::uint8_t>{}), Error);

  const auto identity = parse_reference_case(solid(8, 8, 128, 128, 128), {});
  CHECK(identity.text.find("no-op baseline") != std::string::npos);

  RetouchParams spire;
  spire.basic = {1.5, 20, -60, 50, -20, 30, 7000, 10, 30, 10};
  const auto ref = parse_reference_case(solid(8, 8, 128, 128, 128), spire);
  CHECK(ref.text.find("highlights -60") != std::string::npos);
  CHECK(ref.text.find("shadows +50") != std::string::npos);
  CHECK(ref.params == spire);
  CHECK(parse_reference_case(solid(8, 8, 128, 128, 128), spire).text == ref.text);

  RetouchParams bad;
  bad.basic.shadows = 150;
  CHECK_THROWS_AS(parse_reference_case(solid(8, 8, 128, 128, 128), bad), Error);
  CHECK(style_from_text(std::string(5000, 'a')).text.size() == kMaxDirectiveLength);
}

TEST_CASE("config parsing") {
  const auto c = config_from_json(json::parse(R"({"port":9000,"backend":{"kind":"replay","transcript":"t.jsonl"}})"));
  CHECK(c.port == 9000);
  CHECK(c.backend.kind == "replay");
  CHECK(c.max_iterations == 5);
  CHECK_THROWS_AS(config_from_json(json::parse(R"({"prot":9000})")), Error);
  CHECK_THROWS_AS(make_backend({.kind = "replay"}), Error);
  CHECK_THROWS_AS(make_backend({.kind = "oracle"}), Error);
}
