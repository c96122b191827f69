#pragma once

#include "facered/numerics.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace facered {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Locale-independent parsing; throws Parse on malformed or partial input.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

/// Reads whitespace-separated tokens line by line, skipping blank lines and
/// lines starting with '#'. Tracks line numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line split into tokens; false at end of input.
  bool next(std::vector<std::string>& tokens);
  long line_number() const { return line_; }
  /// Throws Parse with the current line number prepended.
  [[noreturn]] void fail(const std::string& what) const;
  /// Requires the next line to be exactly `keyword <value>` and returns value.
  long long expect_keyed(std::string_view keyword);

 private:
  std::istream& in_;
  long line_ = 0;
};

/// General dense matrix: "rows cols" then the rows.
Matrix read_matrix(std::istream& in);
void write_matrix(std::ostream& out, const Matrix& m);

}  // namespace facered
