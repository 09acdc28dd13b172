#include "finsler/grid.hpp"

#include <cmath>
#include <numbers>

namespace finsler {

std::pair<Vector, Vector> oriented_frame(int n, double r, double s_fraction, double theta, double tilt) {
  Vector e = Vector::Zero(n);
  Vector t = Vector::Zero(n);
  e[0] = std::cos(theta);
  e[1] = std::sin(theta);
  t[0] = -std::sin(theta);
  t[1] = std::cos(theta);
  if (n > 2) {
    t *= std::cos(tilt);
    t[2] = std::sin(tilt);
  }
  const Vector x = r * e;
  const Vector y = s_fraction * e + std::sqrt(1.0 - s_fraction * s_fraction) * t;
  return {x, y};
}

std::vector<GridFrame> sample_grid(const MetricSpec& spec, int n, const GridSpec& grid, const FrameGuards& guards) {
  std::mt19937_64 rng(grid.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> jitter(grid.angle_count), tilt(grid.angle_count);
  for (int a = 0; a < grid.angle_count; ++a) {
    jitter[a] = unit(rng);
    tilt[a] = std::numbers::pi * (unit(rng) - 0.5);
  }

  std::vector<GridFrame> out;
  out.reserve(static_cast<std::size_t>(grid.r.count) * grid.s_fraction.count * grid.angle_count);
  for (int i = 0; i < grid.r.count; ++i) {
    for (int j = 0; j < grid.s_fraction.count; ++j) {
      for (int a = 0; a < grid.angle_count; ++a) {
        const double r = grid.r.at(i);
        const double sf = grid.s_fraction.at(j);
        const double theta = 2.0 * std::numbers::pi * (a + jitter[a]) / grid.angle_count;
        const auto [x, y] = oriented_frame(n, r, sf, theta, tilt[a]);
        out.push_back({r, sf, a, make_frame(spec, x, y, guards)});
      }
    }
  }
  return out;
}

Matrix random_rotation(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  }
  const Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  // Fix the sign ambiguity of QR, then force det = +1.
  for (int i = 0; i < n; ++i) {
    if (qr.matrixQR()(i, i) < 0.0) q.col(i) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

}  // namespace finsler
