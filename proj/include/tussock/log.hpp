#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace tussock {

// Library-wide logger ("tussock"), writing to stderr.
std::shared_ptr<spdlog::logger> logger();

// 0 = off, 1 = warnings, 2 = info, 3 = debug.
void set_log_verbosity(int level);

}  // namespace tussock
