#include "loopharm/gallery.hpp"

#include <cmath>

namespace loopharm {

namespace {

using Complex = std::complex<double>;

template <typename F>
MapGrid sample(const GridSpec& spec, int dim, F&& f) {
  MapGrid grid(spec, dim);
  const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny;
  parallel_for(n, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % spec.nx), j = static_cast<int>(idx / spec.nx);
    grid.points().col(idx) = f(grid.z(i, j));
  });
  return grid;
}

Eigen::MatrixXcd exp_any(const Eigen::MatrixXcd& a) {
  if (a.rows() == 3 && a.cols() == 3) return matrix_exp3(Eigen::Matrix3cd(a));
  return matrix_exp(a);
}

}  // namespace

MapGrid vacuum_map(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const GroupDescriptor& group,
                   const GridSpec& spec) {
  const LieAlgebraData alg = group.algebra();
  if (!alg.has_representation()) throw Error(ErrorKind::InvalidArgument, group.name() + " has no matrix model");
  if (X.size() != alg.dim() || Y.size() != alg.dim())
    throw Error(ErrorKind::InvalidArgument, "X and Y must be algebra vectors");
  const Eigen::MatrixXcd xm = alg.to_matrix(X.cast<Complex>()), ym = alg.to_matrix(Y.cast<Complex>());
  return sample(spec, group.dim(), [&](Complex z) -> Eigen::VectorXd {
    return group.coords_from_matrix(exp_any(z.real() * xm) * exp_any(z.imag() * ym));
  });
}

MapGrid horosphere(const GridSpec& spec, bool reparametrize) {
  if (!reparametrize) return vacuum_map(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), solv_group({1, 1}), spec);
  return sample(spec, 3, [](Complex z) -> Eigen::VectorXd {
    const Complex w = z + std::pow(z, 4) / 4.0;
    return Eigen::Vector3d(w.real(), w.imag(), 0);
  });
}

MapGrid nil_from_holomorphic(const std::vector<HoloPoly>& f, const GridSpec& spec) {
  if (f.size() < 3 || f.size() % 2 == 0)
    throw Error(ErrorKind::InvalidArgument, "Nil maps need 2n + 1 holomorphic functions, n >= 1");
  for (const HoloPoly& p : f) p.require_input_degree();
  const int dim = static_cast<int>(f.size());
  return sample(spec, dim, [&](Complex z) -> Eigen::VectorXd {
    Eigen::VectorXd v(dim);
    for (int j = 0; j < dim; ++j) v[j] = 2 * f[j](z).real();
    return v;
  });
}

MapGrid hyperbolic_paraboloid(const GridSpec& spec) {
  return nil_from_holomorphic({HoloPoly{Complex(0), Complex(0.5)}, HoloPoly{Complex(0), Complex(0, -0.5)},
                               HoloPoly{Complex(0), Complex(0), Complex(0, -0.125)}},
                              spec);
}

MapGrid sol3_primitive(const HoloPoly& w, double c, const GridSpec& spec) {
  w.require_input_degree();
  const double s = std::exp(-2 * c);
  return sample(spec, 3, [&](Complex z) -> Eigen::VectorXd {
    const Complex v = w(z);
    return Eigen::Vector3d(v.real(), -s * v.imag(), c);
  });
}

ConnectionTensor sol3_levi_civita() { return levi_civita(solv_algebra({1, -1}), MetricTensor::identity(3)); }

SE2CheckReport se2_check_pair(const MapGrid& grid) {
  if (grid.dim() != 3) throw Error(ErrorKind::InvalidArgument, "SE(2) maps have three coordinates");
  const ResidualField direct = neutral_harmonicity_field(grid, se2_group());
  const GridDerivatives d = grid_derivatives(grid);
  const double r2 = std::sqrt(0.5);
  const Complex i(0, 1);
  ResidualField tr{grid.spec(), Eigen::MatrixXcd::Zero(3, d.dz.cols()), d.valid};
  SE2CheckReport out;
  for (Eigen::Index c = 0; c < d.dz.cols(); ++c) {
    if (!d.valid[c]) continue;
    // complex coordinate change applied to every derivative
    auto change = [&](const auto& v) {
      return Eigen::Vector3cd(r2 * (Complex(v[0]) + i * Complex(v[1])), r2 * (Complex(v[0]) - i * Complex(v[1])),
                              i * Complex(v[2]));
    };
    const Eigen::Vector3cd z = change(d.dz.col(c)), zb = change(d.dzbar.col(c)), lap = change(d.dzdzbar.col(c));
    const Complex cross1 = z[0] * zb[2] + zb[0] * z[2], cross2 = z[1] * zb[2] + zb[1] * z[2];
    tr.values(0, c) = lap[0] - 0.5 * cross1;
    tr.values(1, c) = lap[1] + 0.5 * cross2;
    tr.values(2, c) = lap[2];
    const Eigen::Vector3cd e = direct.values.col(c);
    const Eigen::Vector3cd ue(r2 * (e[0] + i * e[1]), r2 * (e[0] - i * e[1]), i * e[2]);
    out.discrepancy = std::max(out.discrepancy, (tr.values.col(c) - ue).cwiseAbs().maxCoeff());
  }
  out.direct = summarize("se2_direct", direct);
  out.transformed = summarize("se2_transformed", tr);
  out.norm_discrepancy = std::abs(out.direct.max_norm - out.transformed.max_norm);
  return out;
}

}  // namespace loopharm
