#pragma once
// Minimal RFC 4180 reader/writer: comma separated, optional double quotes,
// "" as an escaped quote inside a quoted field, header row required.

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fairtopk {

class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& message, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // source line of each row

  // Index of a header column; throws CsvError (line 1) when missing.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

// Every data row must have as many fields as the header. Blank lines are skipped.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

// Shortest text that parses back to the same double.
std::string format_real(double value);

std::string csv_escape(std::string_view field);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace fairtopk
