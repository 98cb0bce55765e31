#include "loopharm/verify.hpp"

#include <cmath>
#include <numeric>

namespace loopharm {

namespace {

using Complex = std::complex<double>;
const Complex kI(0, 1);

void require_size(const GridSpec& spec) {
  if (spec.nx < 5 || spec.ny < 5) throw Error(ErrorKind::GridTooSmall, "residuals need at least 5x5 samples");
}

// Nodes whose centered 5-point stencil only touches valid entries.
std::vector<std::uint8_t> stencil_valid(const GridSpec& spec, const std::vector<std::uint8_t>& base) {
  std::vector<std::uint8_t> out(base.size(), 0);
  auto at = [&](int i, int j) { return base[static_cast<std::size_t>(j) * spec.nx + i] != 0; };
  for (int j = 1; j + 1 < spec.ny; ++j)
    for (int i = 1; i + 1 < spec.nx; ++i)
      out[static_cast<std::size_t>(j) * spec.nx + i] =
          at(i, j) && at(i - 1, j) && at(i + 1, j) && at(i, j - 1) && at(i, j + 1);
  return out;
}

struct ComplexDerivs {
  Eigen::MatrixXcd dz, dzbar;
  std::vector<std::uint8_t> valid;
};

ComplexDerivs derivatives_of(const GridSpec& spec, const Eigen::MatrixXcd& f, const std::vector<std::uint8_t>& ok) {
  ComplexDerivs d{Eigen::MatrixXcd::Zero(f.rows(), f.cols()), Eigen::MatrixXcd::Zero(f.rows(), f.cols()),
                  stencil_valid(spec, ok)};
  const double h = spec.hx();
  for (int j = 1; j + 1 < spec.ny; ++j)
    for (int i = 1; i + 1 < spec.nx; ++i) {
      const int c = j * spec.nx + i;
      if (!d.valid[c]) continue;
      const Eigen::VectorXcd fx = (f.col(c + 1) - f.col(c - 1)) / (2 * h);
      const Eigen::VectorXcd fy = (f.col(c + spec.nx) - f.col(c - spec.nx)) / (2 * h);
      d.dz.col(c) = 0.5 * (fx - kI * fy);
      d.dzbar.col(c) = 0.5 * (fx + kI * fy);
    }
  return d;
}

ResidualField empty_field(const GridSpec& spec, int rows) {
  return {spec, Eigen::MatrixXcd::Zero(rows, spec.nx * spec.ny),
          std::vector<std::uint8_t>(static_cast<std::size_t>(spec.nx) * spec.ny, 0)};
}

Eigen::VectorXcd sym_apply(const BilinearMap& sym, const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  return sym.apply(x, y);
}

}  // namespace

ResidualReport summarize(std::string name, const ResidualField& field) {
  ResidualReport r;
  r.name = std::move(name);
  r.grid_h = field.spec.hx();
  double sum = 0, comp = 0;
  for (Eigen::Index c = 0; c < field.values.cols(); ++c) {
    if (!field.valid[c]) continue;
    const double n = field.values.col(c).norm();
    r.max_norm = std::max(r.max_norm, n);
    const double y = n * n - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ++r.points;
  }
  r.l2_norm = std::sqrt(sum) * r.grid_h;
  return r;
}

GridDerivatives grid_derivatives(const MapGrid& grid) {
  const GridSpec& spec = grid.spec();
  require_size(spec);
  const int n = grid.dim(), cols = spec.nx * spec.ny;
  GridDerivatives d{Eigen::MatrixXcd::Zero(n, cols), Eigen::MatrixXcd::Zero(n, cols), Eigen::MatrixXd::Zero(n, cols),
                    stencil_valid(spec, grid.mask())};
  const double h = grid.h();
  const Eigen::MatrixXd& p = grid.points();
  for (int j = 1; j + 1 < spec.ny; ++j)
    for (int i = 1; i + 1 < spec.nx; ++i) {
      const int c = grid.index(i, j);
      if (!d.valid[c]) continue;
      const Eigen::VectorXd fx = (p.col(c + 1) - p.col(c - 1)) / (2 * h);
      const Eigen::VectorXd fy = (p.col(c + spec.nx) - p.col(c - spec.nx)) / (2 * h);
      d.dz.col(c) = 0.5 * (fx.cast<Complex>() - kI * fy.cast<Complex>());
      d.dzbar.col(c) = 0.5 * (fx.cast<Complex>() + kI * fy.cast<Complex>());
      d.dzdzbar.col(c) =
          (p.col(c + 1) + p.col(c - 1) + p.col(c + spec.nx) + p.col(c - spec.nx) - 4 * p.col(c)) / (4 * h * h);
    }
  return d;
}

FormGrid numeric_mc_form(const MapGrid& grid, const GroupDescriptor& group) {
  if (grid.dim() != group.dim())
    throw Error(ErrorKind::InvalidArgument, "map dimension does not match " + group.name());
  const GridDerivatives d = grid_derivatives(grid);
  const int cols = grid.nx() * grid.ny();
  FormGrid f{grid.spec(), group.algebra(), Eigen::MatrixXcd::Zero(group.dim(), cols),
             Eigen::MatrixXcd::Zero(group.dim(), cols), d.valid};
  for (int c = 0; c < cols; ++c) {
    if (!d.valid[c]) continue;
    const Eigen::VectorXd p = grid.points().col(c);
    f.A.col(c) = group.left_translate(p, d.dz.col(c));
    f.B.col(c) = group.left_translate(p, d.dzbar.col(c));
  }
  return f;
}

double form_reality_defect(const FormGrid& form) {
  double worst = 0, scale = 0;
  for (Eigen::Index c = 0; c < form.A.cols(); ++c) {
    if (!form.valid[c]) continue;
    worst = std::max(worst, (form.B.col(c) - form.A.col(c).conjugate()).cwiseAbs().maxCoeff());
    scale = std::max(scale, form.A.col(c).cwiseAbs().maxCoeff());
  }
  return worst / std::max(scale, 1.0);
}

// ---------------------------------------------------------------------------
// Form-level residuals

ResidualField flatness_field(const FormGrid& form, Complex lambda, FlatFamily family) {
  if (std::abs(std::abs(lambda) - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "flatness is checked on the unit circle");
  Complex ca, cb;
  if (family == FlatFamily::Neutral) {
    ca = 0.5 * (1.0 - 1.0 / lambda);
    cb = 0.5 * (1.0 - lambda);
  } else {
    ca = 1.0 / lambda;
    cb = lambda;
  }
  const Eigen::MatrixXcd al = ca * form.A, bl = cb * form.B;
  const ComplexDerivs da = derivatives_of(form.spec, al, form.valid);
  const ComplexDerivs db = derivatives_of(form.spec, bl, form.valid);
  ResidualField out = empty_field(form.spec, static_cast<int>(form.A.rows()));
  out.valid = da.valid;
  for (Eigen::Index c = 0; c < al.cols(); ++c) {
    if (!out.valid[c]) continue;
    out.values.col(c) = db.dz.col(c) - da.dzbar.col(c) + form.algebra.bracket(al.col(c), bl.col(c));
  }
  return out;
}

ResidualReport flatness_residual(const FormGrid& form, Complex lambda, FlatFamily family) {
  ResidualReport r = summarize(family == FlatFamily::Neutral ? "flatness_neutral" : "flatness_torsionfree",
                               flatness_field(form, lambda, family));
  r.per_lambda.emplace_back(lambda, r.max_norm);
  return r;
}

ResidualReport flatness_residual(const FormGrid& form, const std::vector<Complex>& lambdas, FlatFamily family) {
  ResidualReport out;
  out.name = family == FlatFamily::Neutral ? "flatness_neutral" : "flatness_torsionfree";
  out.grid_h = form.h();
  for (const Complex& l : lambdas) {
    const ResidualReport r = flatness_residual(form, l, family);
    out.per_lambda.emplace_back(l, r.max_norm);
    if (r.max_norm >= out.max_norm) out.points = r.points;
    out.max_norm = std::max(out.max_norm, r.max_norm);
    out.l2_norm = std::max(out.l2_norm, r.l2_norm);
  }
  return out;
}

ResidualField mc_field(const FormGrid& form) {
  const ComplexDerivs da = derivatives_of(form.spec, form.A, form.valid);
  const ComplexDerivs db = derivatives_of(form.spec, form.B, form.valid);
  ResidualField out = empty_field(form.spec, static_cast<int>(form.A.rows()));
  out.valid = da.valid;
  for (Eigen::Index c = 0; c < form.A.cols(); ++c) {
    if (!out.valid[c]) continue;
    out.values.col(c) = db.dz.col(c) - da.dzbar.col(c) + form.algebra.bracket(form.A.col(c), form.B.col(c));
  }
  return out;
}

ResidualField general_harmonicity_field(const FormGrid& form, const ConnectionTensor& conn) {
  const BilinearMap sym = conn.mu.symmetric_part();
  const ComplexDerivs da = derivatives_of(form.spec, form.A, form.valid);
  const ComplexDerivs db = derivatives_of(form.spec, form.B, form.valid);
  ResidualField out = empty_field(form.spec, static_cast<int>(form.A.rows()));
  out.valid = da.valid;
  for (Eigen::Index c = 0; c < form.A.cols(); ++c) {
    if (!out.valid[c]) continue;
    out.values.col(c) = da.dzbar.col(c) + db.dz.col(c) + 2.0 * sym_apply(sym, form.B.col(c), form.A.col(c));
  }
  return out;
}

ResidualReport general_harmonicity_residual(const FormGrid& form, const ConnectionTensor& conn) {
  return summarize("general_harmonicity", general_harmonicity_field(form, conn));
}

ResidualField hme_field(const FormGrid& form, const ConnectionTensor& conn) {
  ResidualField f = general_harmonicity_field(form, conn);
  f.values = -f.values;
  return f;
}

ResidualField pluri_field(const FormGrid& form, const ConnectionTensor& conn) {
  const BilinearMap sym = conn.mu.symmetric_part();
  const ComplexDerivs da = derivatives_of(form.spec, form.A, form.valid);
  ResidualField out = empty_field(form.spec, static_cast<int>(form.A.rows()));
  out.valid = da.valid;
  for (Eigen::Index c = 0; c < form.A.cols(); ++c) {
    if (!out.valid[c]) continue;
    out.values.col(c) = -2.0 * da.dzbar.col(c) + form.algebra.bracket(form.A.col(c), form.B.col(c)) -
                        2.0 * sym_apply(sym, form.B.col(c), form.A.col(c));
  }
  return out;
}

ResidualField admissibility_field(const FormGrid& form, const ConnectionTensor& conn) {
  const BilinearMap sym = conn.mu.symmetric_part();
  ResidualField out = empty_field(form.spec, static_cast<int>(form.A.rows()));
  out.valid = form.valid;
  for (Eigen::Index c = 0; c < form.A.cols(); ++c)
    if (out.valid[c]) out.values.col(c) = sym_apply(sym, form.A.col(c), form.B.col(c));
  return out;
}

ResidualReport admissibility_residual(const FormGrid& form, const ConnectionTensor& conn) {
  return summarize("admissibility", admissibility_field(form, conn));
}

ResidualField torsion_free_field(const FormGrid& form) {
  ResidualField out = empty_field(form.spec, static_cast<int>(form.A.rows()));
  out.valid = form.valid;
  for (Eigen::Index c = 0; c < form.A.cols(); ++c)
    if (out.valid[c]) out.values.col(c) = form.algebra.bracket(form.A.col(c), form.B.col(c));
  return out;
}

ResidualReport torsion_free_residual(const FormGrid& form) {
  return summarize("torsion_free", torsion_free_field(form));
}

// ---------------------------------------------------------------------------
// Component systems

ResidualField neutral_harmonicity_field(const MapGrid& grid, const GroupDescriptor& group) {
  if (grid.dim() != group.dim())
    throw Error(ErrorKind::InvalidArgument, "map dimension does not match " + group.name());
  const GridDerivatives d = grid_derivatives(grid);
  const int n = group.dim();
  ResidualField out = empty_field(grid.spec(), n);
  out.valid = d.valid;
  for (Eigen::Index c = 0; c < d.dz.cols(); ++c) {
    if (!out.valid[c]) continue;
    auto z = [&](int k) { return d.dz(k, c); };
    auto zb = [&](int k) { return d.dzbar(k, c); };
    auto lap = [&](int k) { return Complex(d.dzdzbar(k, c)); };
    auto cross = [&](int a, int b) { return z(a) * zb(b) + zb(a) * z(b); };
    Eigen::VectorXcd r(n);
    switch (group.kind) {
      case GroupKind::Solv:
        for (int k = 0; k < 2; ++k) r[k] = lap(k) - 0.5 * group.params.mu(k + 1) * cross(k, 2);
        r[2] = lap(2);
        break;
      case GroupKind::Nil: {
        const int m = group.nil_n;
        for (int j = 0; j < 2 * m; ++j) r[j] = lap(j);
        // (phi^i phi^{n+i})_{z zbar} = phi^i_{z zbar} phi^{n+i} + phi^i phi^{n+i}_{z zbar} + cross(i, n+i)
        Complex last = lap(2 * m);
        const auto p = grid.points().col(c);
        for (int i = 0; i < m; ++i) {
          const Complex prod = lap(i) * p[m + i] + p[i] * lap(m + i) + cross(i, m + i);
          last += 0.5 * prod - 0.5 * cross(i, m + i);
        }
        r[2 * m] = last;
        break;
      }
      case GroupKind::SE2:
        r[0] = lap(0) + 0.5 * cross(1, 2);
        r[1] = lap(1) - 0.5 * cross(0, 2);
        r[2] = lap(2);
        break;
    }
    out.values.col(c) = r;
  }
  return out;
}

ResidualReport neutral_harmonicity_residual(const MapGrid& grid, const GroupDescriptor& group) {
  return summarize("neutral_harmonicity", neutral_harmonicity_field(grid, group));
}

ResidualField metric_harmonicity_field(const MapGrid& grid, const SolvParams& params) {
  if (grid.dim() != 3) throw Error(ErrorKind::InvalidArgument, "metric residual needs a map into G(mu1, mu2)");
  const GridDerivatives d = grid_derivatives(grid);
  ResidualField out = empty_field(grid.spec(), 3);
  out.valid = d.valid;
  for (Eigen::Index c = 0; c < d.dz.cols(); ++c) {
    if (!out.valid[c]) continue;
    const double p3 = grid.points()(2, c);
    Complex r3 = d.dzdzbar(2, c);
    for (int k = 0; k < 2; ++k) {
      const double mu = params.mu(k + 1);
      out.values(k, c) = d.dzdzbar(k, c) - mu * (d.dz(k, c) * d.dzbar(2, c) + d.dzbar(k, c) * d.dz(2, c));
      r3 += mu * std::exp(-2 * mu * p3) * d.dz(k, c) * d.dzbar(k, c);
    }
    out.values(2, c) = r3;
  }
  return out;
}

ResidualReport metric_harmonicity_residual(const MapGrid& grid, const SolvParams& params) {
  return summarize("metric_harmonicity", metric_harmonicity_field(grid, params));
}

ResidualField restricted(const ResidualField& field, double margin) {
  ResidualField out = field;
  const GridSpec& sp = field.spec;
  const double slack = 1e-9 * sp.hx();
  for (int j = 0; j < sp.ny; ++j)
    for (int i = 0; i < sp.nx; ++i) {
      const double x = sp.x_min + i * sp.hx(), y = sp.y_min + j * sp.hy();
      const double d = std::min({x - sp.x_min, sp.x_max - x, y - sp.y_min, sp.y_max - y});
      if (d + slack < margin) out.valid[static_cast<std::size_t>(j) * sp.nx + i] = 0;
    }
  return out;
}

double field_distance(const ResidualField& a, const ResidualField& b) {
  double worst = 0;
  for (Eigen::Index c = 0; c < a.values.cols(); ++c)
    if (a.valid[c] && b.valid[c]) worst = std::max(worst, (a.values.col(c) - b.values.col(c)).cwiseAbs().maxCoeff());
  return worst;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& value) {
  if (h.size() != value.size() || h.size() < 2) throw Error(ErrorKind::InvalidArgument, "slope needs two or more samples");
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]), y = std::log(value[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace loopharm
