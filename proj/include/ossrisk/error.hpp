#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ossrisk {

// Problem in an input file. line and column are 1-based; 0 means unknown.
class InputError : public std::runtime_error {
public:
    InputError(std::string file, std::size_t line, std::size_t column, const std::string& message);

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string file_;
    std::size_t line_;
    std::size_t column_;
};

// Model or engine preconditions violated (dimension mismatch, cyclic matrix, ...).
class ModelError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ossrisk
