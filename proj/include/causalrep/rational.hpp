#pragma once

#include <gmpxx.h>

#include <string>

#include "causalrep/errors.hpp"

namespace causalrep {

// Exact arithmetic throughout: indifference must be decided exactly and the
// feasibility certificates are brittle under floating point.
using Rat = mpq_class;

// Accepts "n" and "n/d" with optional sign. Canonicalizes.
inline Rat parse_rational(const std::string& text) {
  if (text.empty()) throw Error("empty rational literal");
  for (char ch : text) {
    if (ch != '-' && ch != '/' && !(ch >= '0' && ch <= '9'))
      throw Error("bad rational literal: '" + text + "'");
  }
  mpq_class q;
  if (q.set_str(text, 10) != 0) throw Error("bad rational literal: '" + text + "'");
  if (q.get_den() == 0) throw Error("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_str(const Rat& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline int sign(const Rat& q) { return sgn(q); }

}  // namespace causalrep
