#pragma once

#include <cmath>
#include <functional>

#include <gtest/gtest.h>

#include "magkit/magkit.hpp"
#include "oracle.hpp"

#define EXPECT_MAGKIT_ERROR(stmt, expected)                                   \
  do {                                                                        \
    bool caught_ = false;                                                     \
    try {                                                                     \
      stmt;                                                                   \
    } catch (const magkit::Error& e_) {                                       \
      caught_ = true;                                                         \
      EXPECT_EQ(magkit::to_string(e_.code()), magkit::to_string(expected))    \
          << e_.what();                                                       \
    }                                                                         \
    EXPECT_TRUE(caught_) << "expected " << magkit::to_string(expected);       \
  } while (0)

namespace support {

inline magkit::MetricSpace two_point(double d) {
  magkit::Matrix m(2, 2);
  m << 0, d, d, 0;
  return magkit::from_distance_matrix(m);
}

/// d(1,2) = 2, d(1,3) = d(2,3) = 100.
inline magkit::MetricSpace two_cluster() {
  magkit::Matrix m(3, 3);
  m << 0, 2, 100, 2, 0, 100, 100, 100, 0;
  return magkit::from_distance_matrix(m);
}

/// Three points with Z = [[1,.5,.1],[.5,1,.1],[.1,.1,1]].
inline magkit::MetricSpace small_example() {
  magkit::Matrix m(3, 3);
  m << 0, std::log(2.0), std::log(10.0), std::log(2.0), 0, std::log(10.0), std::log(10.0),
      std::log(10.0), 0;
  return magkit::from_distance_matrix(m);
}

inline magkit::MetricSpace random_cloud(oracle::Rng& rng, std::size_t n, std::size_t dim = 2,
                                        double side = 3.0) {
  return magkit::from_points_euclidean(oracle::random_points(rng, n, dim, 0.0, side));
}

inline magkit::MetricSpace discrete(std::size_t n, double d = 60.0) {
  return magkit::from_distance_matrix(oracle::uniform_metric(n, d));
}

}  // namespace support
