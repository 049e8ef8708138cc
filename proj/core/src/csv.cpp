#include "alsp/csv.hpp"

#include "alsp/error.hpp"

namespace alsp {
namespace {

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out << ',';
    out << CsvWriter::quote(cells[i]);
  }
  out << "\r\n";
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, std::string_view table,
                     std::initializer_list<std::string_view> columns, std::string_view note)
    : CsvWriter(out, table, std::vector<std::string>(columns.begin(), columns.end()), note) {}

CsvWriter::CsvWriter(std::ostream& out, std::string_view table,
                     const std::vector<std::string>& columns, std::string_view note)
    : out_(out), columns_(columns.size()) {
  out_ << "# alsp-csv v" << kCsvSchemaVersion << ' ' << table << "\r\n";
  if (!note.empty()) out_ << "# " << note << "\r\n";
  write_row(out_, columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) {
    throw Error(ErrorCode::InvalidArgument, "CSV row width differs from header");
  }
  write_row(out_, cells);
}

std::string CsvWriter::quote(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      ++i;
      continue;
    }
    if (text[i] == '\n' || text[i] == '\r') {
      ++i;
      continue;
    }
    std::vector<std::string> row;
    std::string cell;
    bool quoted = false;
    for (; i < text.size(); ++i) {
      const char c = text[i];
      if (quoted) {
        if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cell.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        row.push_back(std::move(cell));
        cell.clear();
      } else if (c == '\r' || c == '\n') {
        break;
      } else {
        cell.push_back(c);
      }
    }
    if (quoted) throw Error(ErrorCode::InvalidArgument, "unterminated quoted CSV field");
    row.push_back(std::move(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace alsp
