#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gather {

/// Input data failed validation (bad file contents, dangling references,
/// inconsistent inputs). Carries every issue found, not just the first.
class DataError : public std::runtime_error {
public:
    explicit DataError(std::string message)
        : std::runtime_error(message), issues_{std::move(message)} {}

    DataError(const std::string& context, std::vector<std::string> issues)
        : std::runtime_error(join(context, issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::string& context, const std::vector<std::string>& issues) {
        std::string out = context;
        for (const auto& issue : issues) {
            out += "\n  ";
            out += issue;
        }
        return out;
    }

    std::vector<std::string> issues_;
};

/// Invalid configuration values (k < 1, increasing hop weights, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// LLM endpoint could not be reached or answered with a non-success status.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gather
