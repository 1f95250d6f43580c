#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace simenc {

/// In-memory CSV with a header row. Cells are raw strings; missing trailing
/// cells read back as empty.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a named column; throws std::runtime_error when absent.
  std::size_t column_index(const std::string& name) const;
};

/// RFC 4180-style parser: quoted fields, embedded commas, quotes and
/// newlines. Throws std::runtime_error on an unreadable file.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::string csv_escape(const std::string& cell);
void write_csv_row(std::ostream& os, const std::vector<std::string>& cells);

}  // namespace simenc
