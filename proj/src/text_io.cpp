#include "facered/text_io.hpp"

#include "facered/error.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace facered {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::Parse, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

long long parse_int(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorKind::Parse, "not an integer: '" + std::string(s) + "'");
  }
  return v;
}

bool LineReader::next(std::vector<std::string>& tokens) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    tokens.clear();
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    if (tokens.empty() || tokens.front().front() == '#') continue;
    return true;
  }
  tokens.clear();
  return false;
}

void LineReader::fail(const std::string& what) const {
  throw Error(ErrorKind::Parse, "line " + std::to_string(line_) + ": " + what);
}

long long LineReader::expect_keyed(std::string_view keyword) {
  std::vector<std::string> t;
  if (!next(t)) fail("expected '" + std::string(keyword) + "', got end of input");
  if (t.size() != 2 || t[0] != keyword) fail("expected '" + std::string(keyword) + " <value>'");
  try {
    return parse_int(t[1]);
  } catch (const Error&) {
    fail("bad integer after '" + std::string(keyword) + "'");
  }
}

Matrix read_matrix(std::istream& in) {
  LineReader rd(in);
  std::vector<std::string> t;
  if (!rd.next(t) || t.size() != 2) rd.fail("expected 'rows cols'");
  const long long rows = parse_int(t[0]);
  const long long cols = parse_int(t[1]);
  if (rows < 0 || cols < 0) rd.fail("negative matrix size");
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    if (!rd.next(t)) rd.fail("missing matrix row");
    if (static_cast<long long>(t.size()) != cols) rd.fail("row length differs from cols");
    for (long long j = 0; j < cols; ++j) m(i, j) = parse_double(t[static_cast<size_t>(j)]);
  }
  if (rd.next(t)) rd.fail("trailing data after matrix");
  return m;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << format_double(m(i, j));
    out << '\n';
  }
}

}  // namespace facered
