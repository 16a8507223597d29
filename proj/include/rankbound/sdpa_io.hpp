#pragma once

#include <string>

#include "rankbound/sdp.hpp"

namespace rankbound {

// Sparse SDPA (.dat-s) text. The problem  min b'y  s.t.  C + sum_v y_v A_v >= 0
// maps to F_0 = -C, F_v = A_v, c = b. Inequality rows go into one trailing
// diagonal block. Equality rows either become pairs of opposite inequalities in
// that block (plain SDPA) or, with equality_extension, a separate diagonal block
// announced by a leading "*equalities <block>" comment line.
struct SdpaOptions {
  bool equality_extension = false;
};

std::string export_sdpa(const SdpProblem& p, const SdpaOptions& opts = {});

// Reads what export_sdpa writes, plus ordinary SDPA files ('"' or '*' comment
// lines, "{}(),"-separated block sizes). Throws ParseError.
SdpProblem import_sdpa(const std::string& text);

}  // namespace rankbound
