#pragma once

/**
 * @file grid.hpp
 * @brief Frame sampling over (r, s-fraction, orientation) grids.
 */

#include <random>
#include <utility>
#include <vector>

#include "finsler/config.hpp"
#include "finsler/curvature.hpp"

namespace finsler {

struct GridFrame {
  double r = 0.0;
  double s_fraction = 0.0;
  int angle_index = 0;
  PointFrame frame;
};

/// x on the circle of radius r in the (e1, e2) plane at angle theta, and a
/// unit y with <x, y> / |y| = s_fraction * r. In n > 2 the y component
/// orthogonal to x is tilted out of the plane by `tilt`.
std::pair<Vector, Vector> oriented_frame(int n, double r, double s_fraction, double theta, double tilt = 0.0);

/// Every grid cell, including the ones rejected by the guards (frame.valid false).
/// Orientation angles are jittered from `grid.seed`, so a seed fixes the grid.
std::vector<GridFrame> sample_grid(const MetricSpec& spec, int n, const GridSpec& grid, const FrameGuards& guards = {});

/// A uniformly random rotation of R^n (det = +1).
Matrix random_rotation(int n, std::mt19937_64& rng);

}  // namespace finsler
