#include "ossrisk/error.hpp"

namespace ossrisk {

namespace {

std::string describe(const std::string& file, std::size_t line, std::size_t column, const std::string& message) {
    std::string where = file;
    if (line > 0) {
        where += ":" + std::to_string(line);
        if (column > 0) where += ":" + std::to_string(column);
    }
    return where + ": " + message;
}

} // namespace

InputError::InputError(std::string file, std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(describe(file, line, column, message)), file_(std::move(file)), line_(line), column_(column) {}

} // namespace ossrisk
