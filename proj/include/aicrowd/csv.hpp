#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace aicrowd {

using CsvRow = std::vector<std::string>;

// RFC 4180 parsing: quoted fields, "" escapes, LF or CRLF record breaks,
// newlines allowed inside quoted fields. Fully empty records are skipped.
std::vector<CsvRow> parse_csv(std::string_view text);

std::string csv_escape(std::string_view field);
std::string join_csv_row(const CsvRow& row);

std::string read_text_file(const std::string& path);
std::vector<CsvRow> read_csv_file(const std::string& path);

// Writes via a temp file + rename so readers never observe partial content.
void write_text_file_atomic(const std::string& path, std::string_view content);
void write_csv_file(const std::string& path, const std::vector<CsvRow>& rows);

// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_integer(std::string_view s);

bool is_valid_utf8(std::string_view s);

}  // namespace aicrowd
