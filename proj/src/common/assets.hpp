#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace photoart {

// Prompt templates and JSON schemas compiled into the library, keyed by
// repository-relative path ("schemas/reflection.schema.json",
// "assets/prompts/v1/reflection.txt").
struct EmbeddedAsset {
  std::string_view name;
  std::string_view content;
};

const std::vector<EmbeddedAsset>& embedded_assets();

std::optional<std::string_view> find_asset(std::string_view name);

}  // namespace photoart
