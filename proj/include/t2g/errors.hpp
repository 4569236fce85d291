#pragma once

#include <stdexcept>
#include <string>

namespace t2g {

// Root of the project's exception hierarchy. `kind()` is a stable
// machine-readable tag; the CLI prints it in its one-line error format.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("IoError", message) {}
};

}  // namespace t2g
