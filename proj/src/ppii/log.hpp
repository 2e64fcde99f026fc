#pragma once

#include <spdlog/spdlog.h>

namespace ppii {

// Shared stderr logger; level taken once from PPII_LOG
// (trace, debug, info, warn, error, off; default warn).
spdlog::logger& logger();

}  // namespace ppii
