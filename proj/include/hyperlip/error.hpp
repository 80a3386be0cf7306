#pragma once

#include <stdexcept>
#include <string>

namespace hyperlip {

// All module errors carry a stable machine-readable code next to the
// human-readable message; the CLI maps codes into reports and exit status.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool cond, const std::string& code, const std::string& message) {
    if (!cond) fail(code, message);
}

} // namespace hyperlip
