#pragma once

// Point counting over prime fields. count_points() in curve.hpp dispatches
// between the two methods here.

#include <cstddef>

#include "ecstab/curve.hpp"

namespace ecstab {

/// Scans every x in F_ell. O(ell) time and memory.
u64 count_points_exhaustive(const CurveFp& curve);

struct BsgsOutcome {
  u64 count = 0;
  /// Points sampled before the Hasse interval held a single candidate.
  std::size_t points_used = 0;
  /// True when 16 points left the order ambiguous and the exhaustive scan
  /// produced the count.
  bool fell_back = false;
};

/// Order-of-random-point baby-step giant-step over the Hasse interval.
/// Points are drawn deterministically so results are reproducible.
BsgsOutcome count_points_bsgs(const CurveFp& curve);

}  // namespace ecstab
