#include "facered/problem_io.hpp"

#include "facered/error.hpp"
#include "facered/text_io.hpp"

#include <istream>
#include <ostream>
#include <set>
#include <tuple>

namespace facered {

ConicProblem read_problem(std::istream& in) {
  LineReader rd(in);
  std::vector<std::string> t;
  auto single = [&](const char* what) {
    if (!rd.next(t) || t.size() != 1) rd.fail(std::string("expected ") + what);
    return parse_int(t[0]);
  };
  const long long m = single("constraint count");
  if (m < 0) rd.fail("negative constraint count");
  if (single("block count") != 1) rd.fail("only one PSD block is supported");
  const long long n = single("block order");
  if (n < 1) rd.fail("block order must be positive");
  Vector b(m);
  if (m > 0) {
    if (!rd.next(t) || static_cast<long long>(t.size()) != m) rd.fail("expected m values of b");
    for (long long k = 0; k < m; ++k) b(k) = parse_double(t[static_cast<size_t>(k)]);
  }
  std::vector<SymMatrix> a(static_cast<size_t>(m), SymMatrix(n));
  SymMatrix c(n);
  std::set<std::tuple<long long, long long, long long>> seen;
  while (rd.next(t)) {
    if (t.size() != 5) rd.fail("expected 'mat blk i j val'");
    const long long mat = parse_int(t[0]);
    const long long blk = parse_int(t[1]);
    long long i = parse_int(t[2]);
    long long j = parse_int(t[3]);
    const double v = parse_double(t[4]);
    if (mat < 0 || mat > m) rd.fail("matrix index out of range");
    if (blk != 1) rd.fail("block index must be 1");
    if (i < 1 || i > n || j < 1 || j > n) rd.fail("entry index out of range");
    if (i > j) std::swap(i, j);
    if (!seen.emplace(mat, i, j).second) rd.fail("duplicate entry");
    SymMatrix& target = mat == 0 ? c : a[static_cast<size_t>(mat - 1)];
    target.set(static_cast<Index>(i - 1), static_cast<Index>(j - 1), v);
  }
  return ConicProblem(std::move(a), b, c);
}

namespace {

void write_entries(std::ostream& out, Index mat, const SymMatrix& s) {
  for (Index i = 0; i < s.n(); ++i)
    for (Index j = i; j < s.n(); ++j)
      if (s(i, j) != 0.0)
        out << mat << " 1 " << i + 1 << ' ' << j + 1 << ' ' << format_double(s(i, j)) << '\n';
}

}  // namespace

void write_problem(std::ostream& out, const ConicProblem& p) {
  out << p.m() << "\n1\n" << p.n() << '\n';
  for (Index k = 0; k < p.m(); ++k) out << (k ? " " : "") << format_double(p.b()(k));
  out << '\n';
  write_entries(out, 0, p.c());
  for (Index k = 0; k < p.m(); ++k) write_entries(out, k + 1, p.a(k));
}

}  // namespace facered
