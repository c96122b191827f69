#pragma once

#include <iosfwd>

namespace facered::cli {

/// Exit codes: 0 ok, 2 parse error, 3 invalid data, 4 pipeline diagnostic.
inline constexpr int kOk = 0;
inline constexpr int kParse = 2;
inline constexpr int kInvalid = 3;
inline constexpr int kDiagnostic = 4;

/// Runs the command line; the JSON report goes to `out`, messages to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace facered::cli
