#include "agent/prompts.hpp"

#include "common/assets.hpp"
#include "common/error.hpp"

namespace photoart {

namespace {

std::string asset_or_fail(const std::string& name) {
  const auto a = find_asset(name);
  if (!a) fail(ErrorCode::kInternal, "missing embedded asset " + name);
  return std::string(*a);
}

}  // namespace

std::string system_prompt() {
  return asset_or_fail("assets/prompts/" + std::string(kPromptVersion) + "/system.txt");
}

std::string stage_template(std::string_view stage) {
  return asset_or_fail("assets/prompts/" + std::string(kPromptVersion) + "/" + std::string(stage) + ".txt");
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) break;
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) fail(ErrorCode::kInternal, "unterminated placeholder in template");
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    const auto it = values.find(key);
    if (it == values.end()) fail(ErrorCode::kInternal, "template placeholder {{" + key + "}} has no value");
    out += it->second;
    pos = close + 2;
  }
  out.append(tmpl.substr(pos));
  return out;
}

}  // namespace photoart
