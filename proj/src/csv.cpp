#include "simenc/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace simenc {

std::size_t CsvTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::runtime_error("missing column: " + name);
}

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string cell;
  bool in_quotes = false;
  bool cell_started = false;

  auto end_cell = [&] {
    record.push_back(std::move(cell));
    cell.clear();
    cell_started = false;
  };
  auto end_record = [&] {
    end_cell();
    // Skip blank lines outside quotes.
    if (record.size() > 1 || !record[0].empty()) records.push_back(record);
    record.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && !cell_started) {
      in_quotes = true;
      cell_started = true;
    } else if (c == ',') {
      end_cell();
    } else if (c == '\r') {
      // swallowed; \r\n handled at \n
    } else if (c == '\n') {
      end_record();
    } else {
      cell += c;
      cell_started = true;
    }
    ++i;
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  if (!cell.empty() || cell_started || !record.empty()) end_record();

  CsvTable table;
  if (records.empty()) throw std::runtime_error("csv: empty file");
  table.header = std::move(records.front());
  table.rows.assign(records.begin() + 1, records.end());
  for (auto& row : table.rows) row.resize(table.header.size());
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) os << ',';
    os << csv_escape(cells[i]);
  }
  os << '\n';
}

}  // namespace simenc
