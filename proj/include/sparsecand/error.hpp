#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsecand {

// Malformed dataset or network text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + ", line " + std::to_string(line)), line_(line) {}
    explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// A configured size limit (table cells, enumeration size, factorial bound) was exceeded.
class LimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sparsecand
