#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace alsp {

inline constexpr int kCsvSchemaVersion = 1;

/// RFC 4180 writer. The first line is a schema comment
/// "# alsp-csv v<version> <table>", then an optional "# <note>" line, then
/// the header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::string_view table, std::initializer_list<std::string_view> columns,
            std::string_view note = {});
  CsvWriter(std::ostream& out, std::string_view table, const std::vector<std::string>& columns,
            std::string_view note = {});

  void row(const std::vector<std::string>& cells);
  std::size_t columns() const noexcept { return columns_; }

  static std::string quote(std::string_view cell);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

/// Parses RFC 4180 text, skipping lines that start with '#'. Returns rows
/// including the header row.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace alsp
