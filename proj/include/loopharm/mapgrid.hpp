#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "loopharm/errors.hpp"

namespace loopharm {

/// Rectangular sampling domain with uniform spacing in x and y.
struct GridSpec {
  double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
  int nx = 33, ny = 33;

  double hx() const { return (x_max - x_min) / (nx - 1); }
  double hy() const { return (y_max - y_min) / (ny - 1); }
  /// Throws GridTooSmall below 5x5 and InvalidArgument for non-uniform spacing.
  void validate() const;
};

/// Square grid on [-half, half]^2 with spacing h.
GridSpec square_grid(double half_width, double h);

/// A sampled map into a dim-dimensional group: column j * nx + i holds the
/// coordinates at z = (x_min + i h) + (y_min + j h) i.
class MapGrid {
 public:
  struct Slice {
    std::complex<double> lambda;
    Eigen::MatrixXd points;
  };

  MapGrid() = default;
  MapGrid(const GridSpec& spec, int dim);

  const GridSpec& spec() const noexcept { return spec_; }
  int nx() const noexcept { return spec_.nx; }
  int ny() const noexcept { return spec_.ny; }
  int dim() const noexcept { return static_cast<int>(points_.rows()); }
  double h() const noexcept { return spec_.hx(); }
  int index(int i, int j) const noexcept { return j * spec_.nx + i; }
  std::complex<double> z(int i, int j) const {
    return {spec_.x_min + i * spec_.hx(), spec_.y_min + j * spec_.hy()};
  }

  Eigen::MatrixXd& points() noexcept { return points_; }
  const Eigen::MatrixXd& points() const noexcept { return points_; }
  auto point(int i, int j) { return points_.col(index(i, j)); }
  auto point(int i, int j) const { return points_.col(index(i, j)); }

  /// 1 for valid samples, 0 for masked ones.
  std::vector<std::uint8_t>& mask() noexcept { return mask_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }
  bool valid(int i, int j) const { return mask_[index(i, j)] != 0; }
  int masked_count() const;

  std::vector<Slice>& slices() noexcept { return slices_; }
  const std::vector<Slice>& slices() const noexcept { return slices_; }
  /// The s-th lambda slice as a standalone grid.
  MapGrid slice_grid(std::size_t s) const;

 private:
  GridSpec spec_;
  Eigen::MatrixXd points_;
  std::vector<std::uint8_t> mask_;
  std::vector<Slice> slices_;
};

/// Runs f(i) for i in [0, n) on a fixed partition into contiguous blocks.
/// Results only depend on f, never on scheduling.
template <typename F>
void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * block, hi = std::min(n, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace loopharm
