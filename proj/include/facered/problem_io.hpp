#pragma once

#include "facered/conic.hpp"

#include <iosfwd>

namespace facered {

/// SDPA-like single-block format: "m", "1", "n", the m entries of b, then
/// "mat blk i j val" lines (mat 0 is C, 1-based upper triangle). Values are
/// printed in shortest round-trip form.
ConicProblem read_problem(std::istream& in);
void write_problem(std::ostream& out, const ConicProblem& p);

}  // namespace facered
