#include "tussock/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>

#include "tussock/errors.hpp"

namespace tussock {

std::shared_ptr<spdlog::logger> logger() {
    static const std::shared_ptr<spdlog::logger> instance = [] {
        auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
        auto log = std::make_shared<spdlog::logger>("tussock", sink);
        log->set_pattern("[%l] %v");
        log->set_level(spdlog::level::warn);
        return log;
    }();
    return instance;
}

void set_log_verbosity(int level) {
    switch (level) {
    case 0: logger()->set_level(spdlog::level::off); break;
    case 1: logger()->set_level(spdlog::level::warn); break;
    case 2: logger()->set_level(spdlog::level::info); break;
    default: logger()->set_level(spdlog::level::debug); break;
    }
}

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::OutOfBounds: return "out-of-bounds";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    case ErrorCode::MissingBand: return "missing-band";
    case ErrorCode::Configuration: return "configuration";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace tussock
