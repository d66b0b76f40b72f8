#pragma once

namespace magkit {

// Numerical thresholds shared by all modules. Defaults are the library's
// calibrated values; the CLI may override some of them.
struct Tolerances {
  // triangle inequality slack, relative to the largest distance
  double metric = 1e-9;
  // eigenvalue cutoff for definiteness, relative to max(1, lambda_max)
  double pd = 1e-10;
  // Moore-Penrose rank cutoff, relative to the largest |eigenvalue| of K
  double pinv = 1e-12;
  // smallest/largest singular value of simplex edge vectors
  double simplex = 1e-12;
  // absolute band around zero for the strict inequalities w > 0, c > 0
  double strict = 1e-12;
  // residual allowed for Z w = 1 when accepting a weighting
  double residual = 1e-9;
  // incremental vs recomputed subspace magnitude before warning
  double conditioning = 1e-6;
  // homogeneity test ||Z1 - mean(Z1) 1||_inf
  double homogeneity = 1e-10;
};

}  // namespace magkit
