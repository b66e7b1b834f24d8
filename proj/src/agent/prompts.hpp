#pragma once

#include <map>
#include <string>
#include <string_view>

namespace photoart {

inline constexpr std::string_view kPromptVersion = "v1";

std::string system_prompt();
std::string stage_template(std::string_view stage);

// Substitutes {{name}} placeholders. A placeholder with no value throws
// Error(kInternal) so template and caller cannot drift apart silently.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace photoart
