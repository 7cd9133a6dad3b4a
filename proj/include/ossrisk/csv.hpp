#pragma once

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ossrisk::csv {

struct Row {
    std::size_t line = 0;  // physical line where the record starts
    std::vector<std::string> fields;
};

// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF or LF.
// A UTF-8 byte-order mark at the start is skipped. Blank lines are ignored.
// Throws InputError naming `source`.
std::vector<Row> parse(std::string_view text, const std::string& source);

std::vector<Row> read_file(const std::filesystem::path& path);

// Checks that the first row matches `expected` exactly and returns the data rows.
std::vector<Row> expect_header(std::vector<Row> rows, const std::vector<std::string>& expected,
                               const std::string& source);

std::string quote(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Shortest round-trip decimal form; identical on every conforming platform.
std::string format_double(double value);

} // namespace ossrisk::csv
