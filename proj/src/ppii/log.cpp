#include "ppii/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <cstdlib>
#include <string>

namespace ppii {

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto log = spdlog::stderr_color_mt("ppii");
    const char* env = std::getenv("PPII_LOG");
    log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    log->set_pattern("[%l] %v");
    return log;
  }();
  return *instance;
}

}  // namespace ppii
