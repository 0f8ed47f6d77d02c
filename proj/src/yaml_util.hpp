// Private helpers shared by the YAML-backed loaders.

#ifndef UNLSHARE_SRC_YAML_UTIL_HPP
#define UNLSHARE_SRC_YAML_UTIL_HPP

#include "unlshare/error.hpp"
#include "unlshare/params.hpp"

#include <yaml-cpp/yaml.h>

#include <set>
#include <string>
#include <string_view>

namespace unlshare::detail {

YAML::Node load_yaml(std::string_view text);

void reject_unknown(const YAML::Node& node, const std::set<std::string>& known, std::string_view section);

WifiMacProfile wifi_from_yaml(const YAML::Node& node);
LaaClassProfile laa_from_yaml(const YAML::Node& node);

template <typename T>
T read(const YAML::Node& node, const char* key, const T& fallback)
{
  const YAML::Node value = node[key];
  if (!value)
    return fallback;
  try {
    return value.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("bad value for key '") + key + "'");
  }
}

} // namespace unlshare::detail

#endif
