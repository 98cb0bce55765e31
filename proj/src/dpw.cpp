#include "loopharm/dpw.hpp"

#include <cmath>
#include <memory>

namespace loopharm {

void PotentialSpec::validate() const {
  if (band < 2) throw Error(ErrorKind::InvalidArgument, "potential band must be at least 2");
  xi1.require_input_degree();
  xi2.require_input_degree();
  xi3.require_input_degree();
  if (!std::isfinite(params.mu1) || !std::isfinite(params.mu2))
    throw Error(ErrorKind::InvalidArgument, "non-finite group parameters");
}

Complex integrate_Xi(const HoloPoly& xi3, Complex base_point, Complex z) {
  const HoloPoly prim = xi3.antiderivative();
  return prim(z) - prim(base_point);
}

// ---------------------------------------------------------------------------
// Step 1

Step1Table::Step1Table(const PotentialSpec& pot, double tail_tol) : pot_(pot), tail_tol_(tail_tol) {
  pot_.validate();
  const Complex zs = pot_.base_point;
  xi_big_ = pot_.xi3.shifted(zs).antiderivative();
  for (int k = 0; k < 2; ++k) {
    const double mu = pot_.params.mu(k + 1);
    HoloPoly term = pot_.xi(k + 1).shifted(zs);
    auto& col = columns_[k];
    if (mu == 0.0 || xi_big_.is_zero()) {
      col.push_back(term.antiderivative());
      continue;
    }
    const HoloPoly step = Complex(mu) * xi_big_;
    for (int m = 0; m < pot_.band; ++m) {
      col.push_back(term.antiderivative());
      term = Complex(1.0 / (m + 1)) * (term * step);
    }
  }
}

SolvLoopElement Step1Table::frame(Complex z) const {
  const int n = pot_.band;
  const Complex s = z - pot_.base_point;
  SolvLoopElement c = SolvLoopElement::identity(pot_.params, n);
  c.x3(-1) = xi_big_(s);
  for (int k = 0; k < 2; ++k) {
    const auto& col = columns_[k];
    for (std::size_t m = 0; m < col.size(); ++m) c.entry(k)(-static_cast<int>(m) - 1) = col[m](s);
    if (static_cast<int>(col.size()) == n && std::abs(c.entry(k)[-n]) > tail_tol_)
      throw Error(ErrorKind::BandOverflow, "frame coefficient at lambda^-" + std::to_string(n) + " is " +
                                               std::to_string(std::abs(c.entry(k)[-n])) +
                                               "; increase the band");
  }
  return c;
}

SolvLoopElement solve_step1(const PotentialSpec& pot, Complex z) { return Step1Table(pot).frame(z); }

namespace {

Eigen::Matrix3cd potential_matrix(const PotentialSpec& pot, Complex t) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  const Complex x3 = pot.xi3(t);
  m(0, 0) = pot.params.mu1 * x3;
  m(1, 1) = pot.params.mu2 * x3;
  m(0, 2) = pot.xi1(t);
  m(1, 2) = pot.xi2(t);
  return m;
}

}  // namespace

Eigen::Matrix3cd ode_oracle(const PotentialSpec& pot, Complex z, Complex lambda, int n_steps) {
  if (lambda == Complex(0)) throw Error(ErrorKind::ZeroArgument, "ode_oracle at lambda = 0");
  if (n_steps < 16) throw Error(ErrorKind::InvalidArgument, "ode_oracle needs at least 16 steps");
  const Complex zs = pot.base_point, dz = z - zs;
  const Complex scale = dz / lambda;
  const double h = 1.0 / n_steps;
  auto rhs = [&](const Eigen::Matrix3cd& y, double tau) -> Eigen::Matrix3cd {
    return y * (scale * potential_matrix(pot, zs + tau * dz));
  };
  Eigen::Matrix3cd y = Eigen::Matrix3cd::Identity();
  for (int i = 0; i < n_steps; ++i) {
    const double tau = i * h;
    const Eigen::Matrix3cd k1 = rhs(y, tau);
    const Eigen::Matrix3cd k2 = rhs(y + 0.5 * h * k1, tau + 0.5 * h);
    const Eigen::Matrix3cd k3 = rhs(y + 0.5 * h * k2, tau + 0.5 * h);
    const Eigen::Matrix3cd k4 = rhs(y + h * k3, tau + h);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Steps 2 and 3

IwasawaFactors step2_iwasawa(const SolvLoopElement& c, const SplitOptions& opt) {
  SplitOptions o = opt;
  o.band = std::max(o.band, c.band());
  return iwasawa_split(c, o);
}

SolvLoopElement step3_extended(const SolvLoopElement& f) {
  const SolvPointC at_one = f.eval(Complex(1));
  return solv_mul(f, SolvLoopElement::constant(solv_inv(at_one, f.params), f.params, 0));
}

SolvPoint associated_map(const SolvLoopElement& extended, Complex lambda) {
  const SolvParams& p = extended.params;
  const SolvPointC v = solv_mul(extended.eval(-lambda), solv_inv(extended.eval(lambda), p), p);
  return {v.x1.real(), v.x2.real(), v.x3.real()};
}

std::vector<Complex> default_lambdas() {
  std::vector<Complex> out;
  for (int s = 0; s < 8; ++s) out.push_back(std::polar(1.0, M_PI * s / 4.0));
  out[2] = Complex(0, 1);
  out[4] = Complex(-1, 0);
  out[6] = Complex(0, -1);
  return out;
}

SynthResult synthesize(const PotentialSpec& pot, const GridSpec& spec, const SynthOptions& opt) {
  for (const Complex& l : opt.lambdas)
    if (std::abs(std::abs(l) - 1.0) > 1e-12)
      throw Error(ErrorKind::InvalidArgument, "lambda slices must lie on the unit circle");
  const Step1Table table(pot);
  SynthResult res{MapGrid(spec, 3), {}, 0, 0, 0, {}};
  MapGrid& grid = res.grid;
  for (const Complex& l : opt.lambdas) grid.slices().push_back({l, Eigen::MatrixXd::Zero(3, spec.nx * spec.ny)});

  const std::size_t n = static_cast<std::size_t>(spec.nx) * spec.ny;
  std::vector<double> discarded(n, 0.0), norm_err(n, 0.0);
  std::vector<int> bands(n, 0);
  std::vector<std::string> errors(n);
  if (opt.keep_frames) res.frames.resize(n);
  SplitOptions split = opt.split;
  split.band = std::max(split.band, pot.band);
  split.compute_residual = false;

  parallel_for(
      n,
      [&](std::size_t idx) {
        const int i = static_cast<int>(idx % spec.nx), j = static_cast<int>(idx / spec.nx);
        try {
          const SolvLoopElement c = table.frame(grid.z(i, j));
          const IwasawaFactors f = step2_iwasawa(c, split);
          const SolvLoopElement fh = step3_extended(f.real);
          const SolvPointC one = fh.eval(Complex(1));
          norm_err[idx] = std::max({std::abs(one.x1), std::abs(one.x2), std::abs(one.x3)});
          const SolvPoint phi = associated_map(fh, Complex(1));
          grid.points().col(idx) << phi.x1, phi.x2, phi.x3;
          for (auto& sl : grid.slices()) {
            const SolvPoint v = associated_map(fh, sl.lambda);
            sl.points.col(idx) << v.x1, v.x2, v.x3;
          }
          discarded[idx] = f.report.discarded_mass;
          bands[idx] = f.report.band;
          if (opt.keep_frames) res.frames[idx] = fh;
        } catch (const std::exception& e) {
          grid.mask()[idx] = 0;
          errors[idx] = e.what();
        }
      },
      opt.threads);

  for (std::size_t idx = 0; idx < n; ++idx) {
    res.discarded_mass += discarded[idx];
    res.max_band = std::max(res.max_band, bands[idx]);
    res.max_normalization_error = std::max(res.max_normalization_error, norm_err[idx]);
    if (!errors[idx].empty() && res.failures.size() < 8) {
      const int i = static_cast<int>(idx % spec.nx), j = static_cast<int>(idx / spec.nx);
      res.failures.push_back("(" + std::to_string(i) + "," + std::to_string(j) + "): " + errors[idx]);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Closed form

namespace {

struct GaussLegendre {
  std::vector<double> x, w;
};

// Nodes on [-1, 1] by Newton iteration on P_n.
const GaussLegendre& gauss_legendre64() {
  static const GaussLegendre rule = [] {
    constexpr int n = 64;
    GaussLegendre r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.x[i] = x;
      r.w[i] = 2 / ((1 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

class ClosedForm {
 public:
  ClosedForm(const PotentialSpec& pot, const ClosedFormOptions& opt) : pot_(pot), opt_(opt) {
    pot_.validate();
    for (int k = 0; k < 3; ++k) xi_[k] = pot_.xi(k + 1).shifted(pot_.base_point);
    big_xi_ = xi_[2].antiderivative();
  }

  Complex Xi(Complex z) const { return big_xi_(z - pot_.base_point); }

  // Scalar loop g^k with Xi(a) in the lambda^{-1} slot, conj(Xi(conj b)) in
  // the lambda slot and the column integral up to a.
  Loop g_loop(int k, Complex a, Complex b) const {
    const double mu = pot_.params.mu(k + 1);
    const Complex xa = Xi(a), xb = std::conj(Xi(std::conj(b)));
    const Complex s_end = a - pot_.base_point;
    const auto& gl = gauss_legendre64();
    const int q = static_cast<int>(gl.x.size());
    std::vector<Complex> nodes_xi(q), nodes_big(q);
    for (int i = 0; i < q; ++i) {
      const Complex s = 0.5 * (1 + gl.x[i]) * s_end;
      nodes_xi[i] = 0.5 * gl.w[i] * s_end * xi_[k](s);
      nodes_big[i] = mu * big_xi_(s);
    }

    for (int m = 64;; m *= 2) {
      // I(lambda) = int xi^k exp(lambda^{-1} mu Xi) at the m-th roots of unity
      std::vector<Complex> vals(m);
      double peak = 0;
      for (int s = 0; s < m; ++s) {
        const Complex inv = std::polar(1.0, -2 * M_PI * s / m);
        Complex acc(0);
        for (int i = 0; i < q; ++i) acc += nodes_xi[i] * std::exp(inv * nodes_big[i]);
        vals[s] = acc;
        peak = std::max(peak, std::abs(acc));
      }
      const int half = m / 2;
      Loop col(half + 1);
      double tail = 0;
      for (int j = 0; j < half; ++j) {
        Complex c(0);
        for (int s = 0; s < m; ++s) c += vals[s] * std::polar(1.0, 2 * M_PI * double(s) * j / m);
        c /= double(m);
        col(-(j + 1)) = c;
        if (j >= half / 2) tail = std::max(tail, std::abs(c));
      }
      if (mu == 0.0) {
        Loop g(1);
        g(-1) = col[-1];
        return g;
      }
      if (tail <= opt_.tol * std::max(1.0, peak) || 2 * m > opt_.max_samples) {
        if (tail > opt_.tol * std::max(1.0, peak))
          throw Error(ErrorKind::BandOverflow, "closed-form spectrum did not decay within " +
                                                   std::to_string(m) + " samples");
        Loop expo(1);
        expo(-1) = -mu * xa;
        expo(1) = -mu * xb;
        return loop_mul(loop_exp(expo, half + 1), col, half + 1);
      }
    }
  }

  // real_part-style reflection of the negative band, with the conjugate
  // coefficients taken from the swapped arguments.
  Complex f_tilde(const Loop& g, const Loop& g_swapped, Complex lambda) const {
    Complex acc(0);
    for (int j = 1; j <= g.band(); ++j)
      acc += g[-j] * std::pow(lambda, -j) + std::conj(g_swapped[-j]) * std::pow(lambda, j);
    return acc;
  }

  SolvPointC eval(Complex z, Complex w) const {
    const Complex xa = Xi(z), xb = std::conj(Xi(std::conj(w)));
    SolvPointC out;
    out.x3 = -2.0 * (xa + xb);
    const bool real_point = w == std::conj(z);
    for (int k = 0; k < 2; ++k) {
      const double mu = pot_.params.mu(k + 1);
      const Loop g = g_loop(k, z, w);
      const Loop gs = real_point ? g : g_loop(k, std::conj(w), std::conj(z));
      const Complex diff = f_tilde(g, gs, Complex(-1)) - f_tilde(g, gs, Complex(1));
      out[k] = std::exp(-mu * (xa + xb)) * diff;
    }
    return out;
  }

 private:
  PotentialSpec pot_;
  ClosedFormOptions opt_;
  std::array<HoloPoly, 3> xi_;
  HoloPoly big_xi_;
};

}  // namespace

SolvPointC closed_form_map_c(const PotentialSpec& pot, Complex z, Complex w, const ClosedFormOptions& opt) {
  return ClosedForm(pot, opt).eval(z, w);
}

SolvPoint closed_form_map(const PotentialSpec& pot, Complex z, const ClosedFormOptions& opt) {
  const SolvPointC v = closed_form_map_c(pot, z, std::conj(z), opt);
  return {v.x1.real(), v.x2.real(), v.x3.real()};
}

// ---------------------------------------------------------------------------
// Normalized potentials

SliceAccessor closed_form_slice(const PotentialSpec& pot) {
  auto cf = std::make_shared<ClosedForm>(pot, ClosedFormOptions{});
  return [cf](Complex z) {
    auto at = [&](Complex t) {
      const SolvPointC v = cf->eval(t, Complex(0));
      return Eigen::Vector3cd(v.x1, v.x2, v.x3);
    };
    const double d = 1e-3;
    SliceValue out;
    out.phi = at(z);
    out.phi_z = (-at(z + 2 * d) + 8.0 * at(z + d) - 8.0 * at(z - d) + at(z - 2 * d)) / (12 * d);
    return out;
  };
}

namespace {

// Derivative along one axis at node idx with the widest centered stencil available.
Eigen::VectorXd axis_derivative(const MapGrid& g, int i, int j, int di, int dj) {
  const double h = g.h();
  auto p = [&](int s) -> Eigen::VectorXd { return g.point(i + s * di, j + s * dj); };
  auto inside = [&](int s) {
    const int a = i + s * di, b = j + s * dj;
    return a >= 0 && b >= 0 && a < g.nx() && b < g.ny() && g.valid(a, b);
  };
  if (inside(2) && inside(-2) && inside(1) && inside(-1))
    return (-p(2) + 8 * p(1) - 8 * p(-1) + p(-2)) / (12 * h);
  if (inside(1) && inside(-1)) return (p(1) - p(-1)) / (2 * h);
  throw Error(ErrorKind::InvalidArgument, "slice point needs valid neighbours on both sides");
}

}  // namespace

SliceAccessor grid_slice(const MapGrid& grid) {
  return [&grid](Complex z) {
    const double h = grid.h();
    const int i = static_cast<int>(std::lround((z.real() - grid.spec().x_min) / h));
    const int j = static_cast<int>(std::lround((z.imag() - grid.spec().y_min) / h));
    if (i < 0 || j < 0 || i >= grid.nx() || j >= grid.ny() || std::abs(grid.z(i, j) - z) > 1e-9 * h)
      throw Error(ErrorKind::InvalidArgument, "grid slice requires z on a grid node");
    const Eigen::VectorXd dx = axis_derivative(grid, i, j, 1, 0), dy = axis_derivative(grid, i, j, 0, 1);
    SliceValue out;
    out.phi = grid.point(i, j).head<3>().cast<Complex>();
    out.phi_z = 0.5 * (dx.head<3>().cast<Complex>() - Complex(0, 1) * dy.head<3>().cast<Complex>());
    return out;
  };
}

std::array<Complex, 3> extract_normalized_potential(const SliceAccessor& slice, const MapGrid& grid,
                                                    const SolvParams& params, Complex z) {
  const SliceValue sv = slice(z);
  std::array<Complex, 3> xi{};
  xi[2] = -0.5 * sv.phi_z[2];
  const double h = grid.h();
  const GridSpec& sp = grid.spec();
  for (int k = 0; k < 2; ++k) {
    const double mu = params.mu(k + 1);
    xi[k] = -0.5 * std::exp(-0.5 * mu * sv.phi[2]) * sv.phi_z[k];
    const Complex coef = mu * sv.phi_z[2] / (8.0 * M_PI * Complex(0, 1));
    if (coef == Complex(0)) continue;
    const double margin = std::min({z.real() - sp.x_min, sp.x_max - z.real(), z.imag() - sp.y_min,
                                    sp.y_max - z.imag()});
    if (margin < 2 * h)
      throw Error(ErrorKind::SingularityTooClose, "point is within two grid spacings of the sampled domain edge");
    // int f / (xi - z) dxi ^ dxibar with dxi ^ dxibar = -2i dx dy
    Complex acc(0);
    for (int j = 1; j + 1 < grid.ny(); ++j)
      for (int i = 1; i + 1 < grid.nx(); ++i) {
        const Complex node = grid.z(i, j);
        if (std::abs(node - z) < h) continue;
        if (!grid.valid(i, j) || !grid.valid(i + 1, j) || !grid.valid(i - 1, j) || !grid.valid(i, j + 1) ||
            !grid.valid(i, j - 1))
          continue;
        const double fx = (grid.point(i + 1, j)[k] - grid.point(i - 1, j)[k]) / (2 * h);
        const double fy = (grid.point(i, j + 1)[k] - grid.point(i, j - 1)[k]) / (2 * h);
        const Complex dbar = 0.5 * Complex(fx, fy);
        acc += std::exp(-0.5 * mu * grid.point(i, j)[2]) * dbar / (node - z);
      }
    xi[k] += coef * acc * Complex(0, -2) * h * h;
  }
  return xi;
}

// ---------------------------------------------------------------------------
// Torsion-free maps

Eigen::MatrixXcd torsion_free_map(const std::vector<HoloPoly>& phi, const LieAlgebraData& alg, Complex base_point,
                                  Complex z, Complex lambda, double tol) {
  const int n = alg.dim();
  if (static_cast<int>(phi.size()) != n)
    throw Error(ErrorKind::InvalidArgument, "Phi must have one polynomial per basis vector");
  if (!alg.has_representation()) throw Error(ErrorKind::InvalidArgument, "algebra has no matrix representation");
  if (lambda == Complex(0)) throw Error(ErrorKind::ZeroArgument, "torsion_free_map at lambda = 0");

  constexpr int samples = 9;
  std::vector<Eigen::VectorXcd> vals(samples, Eigen::VectorXcd(n));
  for (int a = 0; a < samples; ++a) {
    const Complex t = base_point + (z - base_point) * (double(a) / (samples - 1));
    for (int c = 0; c < n; ++c) vals[a][c] = phi[c](t);
  }
  for (int a = 0; a < samples; ++a)
    for (int b = 0; b < samples; ++b) {
      const double scale = 1 + vals[a].norm() * vals[b].norm();
      const Eigen::VectorXcd conj_b = vals[b].conjugate();
      const double d1 = alg.bracket(vals[a], vals[b]).cwiseAbs().maxCoeff();
      const double d2 = alg.bracket(vals[a], conj_b).cwiseAbs().maxCoeff();
      if (std::max(d1, d2) > tol * scale)
        throw Error(ErrorKind::NonCommuting, "Phi does not commute with its conjugate along the path");
    }

  Eigen::VectorXcd integral(n);
  for (int c = 0; c < n; ++c) integral[c] = integrate_Xi(phi[c], base_point, z);
  const Eigen::VectorXcd m = integral / lambda + lambda * integral.conjugate();
  const Eigen::MatrixXcd x = alg.to_matrix(m);
  if (x.rows() == 3 && x.cols() == 3) return matrix_exp3(Eigen::Matrix3cd(x));
  return matrix_exp(x);
}

}  // namespace loopharm
