#include "ossrisk/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ossrisk/error.hpp"

namespace ossrisk::csv {

std::vector<Row> parse(std::string_view text, const std::string& source) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<Row> rows;
    Row row;
    std::string field;
    std::size_t line = 1;
    std::size_t column = 1;  // byte column, for error messages
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_has_content = false;
    std::size_t quote_line = 0;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        field_was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        bool blank = row.fields.size() == 1 && row.fields[0].empty() && !row_has_content;
        if (!blank) rows.push_back(std::move(row));
        row = Row{};
        row_has_content = false;
    };

    row.line = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                    column += 2;
                    continue;
                }
                in_quotes = false;
            } else {
                field.push_back(ch);
                if (ch == '\n') {
                    ++line;
                    column = 0;
                }
            }
            ++column;
            continue;
        }
        switch (ch) {
        case '"':
            if (!field.empty() || field_was_quoted)
                throw InputError(source, line, column, "unexpected quote inside unquoted field");
            in_quotes = true;
            field_was_quoted = true;
            row_has_content = true;
            quote_line = line;
            ++column;
            break;
        case ',':
            end_field();
            row_has_content = true;
            ++column;
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') break;
            throw InputError(source, line, column, "bare carriage return");
        case '\n':
            end_row();
            ++line;
            column = 1;
            row.line = line;
            break;
        default:
            if (field_was_quoted)
                throw InputError(source, line, column, "characters after closing quote");
            field.push_back(ch);
            row_has_content = true;
            ++column;
        }
    }
    if (in_quotes) throw InputError(source, quote_line, 0, "unterminated quoted field");
    if (row_has_content || !field.empty()) end_row();
    return rows;
}

std::vector<Row> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string(), 0, 0, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

std::vector<Row> expect_header(std::vector<Row> rows, const std::vector<std::string>& expected,
                               const std::string& source) {
    if (rows.empty()) throw InputError(source, 1, 0, "missing header row");
    const Row& header = rows.front();
    for (std::size_t c = 0; c < std::max(header.fields.size(), expected.size()); ++c) {
        std::string got = c < header.fields.size() ? header.fields[c] : "";
        std::string want = c < expected.size() ? expected[c] : "";
        if (got != want)
            throw InputError(source, header.line, c + 1, "expected header column '" + want + "', found '" + got + "'");
    }
    rows.erase(rows.begin());
    for (const Row& r : rows) {
        if (r.fields.size() != expected.size())
            throw InputError(source, r.line, std::min(r.fields.size(), expected.size()) + 1,
                             "expected " + std::to_string(expected.size()) + " fields, found " +
                                 std::to_string(r.fields.size()));
    }
    return rows;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out.push_back('"');
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << quote(fields[i]);
    }
    out << '\n';
}

std::string format_double(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

} // namespace ossrisk::csv
