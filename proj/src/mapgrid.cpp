#include "loopharm/mapgrid.hpp"

#include <algorithm>
#include <cmath>

namespace loopharm {

void GridSpec::validate() const {
  if (nx < 5 || ny < 5) throw Error(ErrorKind::GridTooSmall, "grid needs at least 5x5 samples");
  if (!(x_max > x_min) || !(y_max > y_min)) throw Error(ErrorKind::InvalidArgument, "empty grid domain");
  const double a = hx(), b = hy();
  if (std::abs(a - b) > 1e-12 * std::max(a, b))
    throw Error(ErrorKind::InvalidArgument, "grid spacing must be uniform (hx = hy)");
}

GridSpec square_grid(double half_width, double h) {
  const int n = static_cast<int>(std::lround(2 * half_width / h)) + 1;
  return {-half_width, half_width, -half_width, half_width, n, n};
}

MapGrid::MapGrid(const GridSpec& spec, int dim) : spec_(spec) {
  spec_.validate();
  points_ = Eigen::MatrixXd::Zero(dim, spec.nx * spec.ny);
  mask_.assign(static_cast<std::size_t>(spec.nx) * spec.ny, 1);
}

int MapGrid::masked_count() const {
  return static_cast<int>(std::count(mask_.begin(), mask_.end(), std::uint8_t{0}));
}

MapGrid MapGrid::slice_grid(std::size_t s) const {
  MapGrid out(spec_, dim());
  out.points_ = slices_.at(s).points;
  out.mask_ = mask_;
  return out;
}

}  // namespace loopharm
