#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace otm {

/// Library error with a stable machine-readable kind tag (e.g. "ill-founded-code").
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Parse failure; `position` is a byte offset into the offending text.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& message)
        : Error("parse-error", "at offset " + std::to_string(position) + ": " + message),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

}  // namespace otm
