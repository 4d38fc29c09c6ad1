#pragma once

#include <stdexcept>
#include <string>

namespace tickimpact {

struct Error : std::runtime_error {
    Error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind(std::move(kind)) {}
    std::string kind;
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("io", msg) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error("parse", msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config", msg) {}
};

struct InsufficientDataError : Error {
    explicit InsufficientDataError(const std::string& msg) : Error("insufficient_data", msg) {}
};

struct DegenerateSampleError : Error {
    explicit DegenerateSampleError(const std::string& msg) : Error("degenerate_sample", msg) {}
};

struct UndefinedObjectiveError : Error {
    explicit UndefinedObjectiveError(const std::string& msg) : Error("undefined_objective", msg) {}
};

}  // namespace tickimpact
