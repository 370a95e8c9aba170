#include "ghostsim/errors.hpp"

namespace ghostsim {

namespace {

std::string join(const std::vector<std::string>& issues) {
  if (issues.empty()) return "invalid configuration";
  std::string out = issues.front();
  for (std::size_t i = 1; i < issues.size(); ++i) out += "; " + issues[i];
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues) : Error(join(issues)), issues_(std::move(issues)) {}

}  // namespace ghostsim
