#pragma once

#include <cstddef>
#include <cstdint>

namespace crossfbm::detail {

// Single sweep of the Lebesgue hitting recursion over a piecewise-linear
// sequence of values. Between hits the state is either "on" a breakpoint
// (index cur) or "between" breakpoints cur and cur+1 (only before the first
// hit). On a monotone segment the new breakpoints are reached consecutively
// in the direction of motion, so each segment reports one run of indices
// [first, last] walked with step +1 or -1 via on_hits(segment, first, last, step).
// Returns whether the first value sits on a breakpoint.
template <class ValueAt, class Grid, class OnHits>
bool sweep_hits(std::size_t count, ValueAt value_at, const Grid& grid, OnHits&& on_hits) {
  double x = value_at(0);
  const bool start_on = grid.on_level(x);
  bool on = start_on;
  std::int64_t cur = grid.floor_index(x);
  for (std::size_t i = 1; i < count; ++i) {
    const double y = value_at(i);
    if (y > x) {
      const std::int64_t top = grid.floor_index(y);
      if (top > cur) {
        on_hits(i, cur + 1, top, +1);
        cur = top;
        on = true;
      }
    } else if (y < x) {
      const std::int64_t bottom = grid.ceil_index(y);
      const std::int64_t from = on ? cur - 1 : cur;
      if (bottom <= from) {
        on_hits(i, from, bottom, -1);
        cur = bottom;
        on = true;
      }
    }
    x = y;
  }
  return start_on;
}

// K from the number of hits: the first hit counts only when the start is
// itself a breakpoint.
inline std::int64_t k_from_hits(std::int64_t hits, bool start_on) {
  if (hits == 0) return 0;
  return start_on ? hits : hits - 1;
}

}  // namespace crossfbm::detail
