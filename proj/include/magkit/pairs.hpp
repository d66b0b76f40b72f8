#pragma once

#include <cstddef>

namespace magkit {

// Sums written over "pairs" in this library range over unordered pairs of
// distinct points {i, j}, each pair visited exactly once (i < j). Every
// coefficient formula goes through these two helpers.

template <class Fn>
void for_each_pair(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) fn(i, j);
  }
}

template <class Fn>
double pair_sum(std::size_t n, Fn&& term) {
  double s = 0.0;
  for_each_pair(n, [&](std::size_t i, std::size_t j) { s += term(i, j); });
  return s;
}

}  // namespace magkit
