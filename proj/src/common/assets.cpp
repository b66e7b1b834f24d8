#include "common/assets.hpp"

namespace photoart {

std::optional<std::string_view> find_asset(std::string_view name) {
  for (const auto& a : embedded_assets()) {
    if (a.name == name) return a.content;
  }
  return std::nullopt;
}

}  // namespace photoart
