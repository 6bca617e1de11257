#pragma once

#include <string_view>

namespace tussock::embedded {

// Contents of config/models.json, config/indices.json and config/profiles.json
// at build time.
std::string_view models_json();
std::string_view indices_json();
std::string_view profiles_json();

}  // namespace tussock::embedded
