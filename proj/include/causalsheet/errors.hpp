#pragma once

#include <stdexcept>
#include <string>

namespace causalsheet {

struct CycleDetected : std::runtime_error {
    explicit CycleDetected(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoConsistentExtension : std::runtime_error {
    explicit NoConsistentExtension(const std::string& msg) : std::runtime_error(msg) {}
};

struct CalibrationFailed : std::runtime_error {
    explicit CalibrationFailed(const std::string& msg) : std::runtime_error(msg) {}
};

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& msg) : std::runtime_error(msg) {}
};

struct TimeoutError : std::runtime_error {
    explicit TimeoutError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedCsv : std::runtime_error {
    explicit MalformedCsv(const std::string& msg) : std::runtime_error(msg) {}
};

struct NoMatchingRecords : std::runtime_error {
    explicit NoMatchingRecords(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace causalsheet
