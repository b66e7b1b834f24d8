#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "histogram/histogram.hpp"
#include "json.hpp"
#include "params/params.hpp"

namespace photoart {

enum class Stage {
  kContentDescription,
  kStrategyProposal,
  kAwaitUserDirection,
  kFinalPlan,
  kToneAnalysis,
  kParamGeneration,
  kRender,
  kReflection,
  kSummary,
  kDone,
  kFailed,
};

std::string_view stage_name(Stage stage);
std::optional<Stage> stage_from_name(std::string_view name);

/// Edges of the stage graph. Reflection -> ToneAnalysis is an edge; whether it
/// may be taken also depends on the iteration budget.
bool is_edge(Stage from, Stage to);

bool is_terminal(Stage stage);

struct Approach {
  std::string name;
  std::string light;
  std::string color;
  std::string channels;

  bool operator==(const Approach&) const = default;
};

struct Directive {
  std::string field;      // parameter path, e.g. "basic.highlights"
  std::string direction;  // "increase" or "decrease"

  bool operator==(const Directive&) const = default;
};

struct Verdict {
  bool satisfactory = false;
  std::string critique;
  std::vector<Directive> directives;

  bool operator==(const Verdict&) const = default;
};

// Either a 1-based pick among the proposed approaches or free text that asks
// the backend to compose its own plan.
struct Direction {
  std::optional<int> approach_index;
  std::string text;

  nlohmann::json to_json() const;
  static Direction from_json(const nlohmann::json& value);
  bool operator==(const Direction&) const = default;
};

struct IterationRecord {
  int index = 0;
  // ToneAnalysis of the image this iteration starts from.
  std::string analysis;
  ToneFindings input_findings;
  // ParamGeneration.
  RetouchParams params;
  std::string rationale;
  // Render.
  std::string image_digest;
  std::string histogram_digest;
  std::optional<HistogramReport> report;
  ToneFindings findings;
  std::string render_trace;
  // Reflection.
  std::optional<Verdict> verdict;
};

struct SessionState {
  std::string id;
  Stage stage = Stage::kContentDescription;
  std::string source_digest;
  std::string source_histogram_digest;
  HistogramReport source_report;
  int max_iterations = 5;
  std::string instruction;
  std::vector<std::string> style_directives;

  std::string description;
  std::string strategy_analysis;
  std::vector<Approach> approaches;
  std::optional<Direction> direction;
  std::string plan;
  std::vector<IterationRecord> iterations;
  std::string summary;
  std::string outcome;  // "satisfactory" or "cap_reached" once Done
  std::string failure;

  // Set while a stage runs; a snapshot carrying it is rolled back to that
  // stage's entry on restore. The counts let the logs be cut back to match.
  std::optional<Stage> in_flight;
  std::uint64_t event_count = 0;
  std::size_t transcript_count = 0;

  // Image of the latest rendered iteration, or the source before the first.
  const std::string& current_digest() const;
};

nlohmann::json to_json(const SessionState& state);
SessionState session_from_json(const nlohmann::json& value);

}  // namespace photoart
