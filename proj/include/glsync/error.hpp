#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glsync {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Raised when a state component becomes non-finite or exceeds the divergence
/// sentinel. `step()` is the index of the step that produced the bad state.
class IntegrationDiverged : public Error {
public:
    IntegrationDiverged(std::size_t step, const std::string& what)
        : Error("integration diverged at step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class FitFailed : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(int line, std::string key, const std::string& msg)
        : Error(format(line, key, msg)), line_(line), key_(std::move(key)) {}

    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    static std::string format(int line, const std::string& key, const std::string& msg) {
        std::string out = "config error";
        if (line > 0) out += " at line " + std::to_string(line);
        if (!key.empty()) out += " (key '" + key + "')";
        return out + ": " + msg;
    }

    int line_;
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace glsync
