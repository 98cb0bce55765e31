#include "loopharm/liegroup.hpp"

#include <algorithm>

#include <Eigen/QR>

namespace loopharm {

Eigen::Matrix3cd solv_matrix(const SolvPointC& x, const SolvParams& p) {
  Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
  m(0, 0) = std::exp(p.mu1 * x.x3);
  m(1, 1) = std::exp(p.mu2 * x.x3);
  m(2, 2) = 1.0;
  m(0, 2) = x.x1;
  m(1, 2) = x.x2;
  return m;
}

SolvPoint solv_exp(const Eigen::Vector3d& v, const SolvParams& p) {
  return {v[0] * detail::phi1(p.mu1 * v[2]), v[1] * detail::phi1(p.mu2 * v[2]), v[2]};
}

// ---------------------------------------------------------------------------

SolvLoopElement::SolvLoopElement(Loop a, Loop b, Loop c, SolvParams p) : params(p) {
  const int n = std::max({a.band(), b.band(), c.band()});
  x1 = a.widened(n);
  x2 = b.widened(n);
  x3 = c.widened(n);
}

SolvLoopElement SolvLoopElement::identity(const SolvParams& p, int band) {
  return {Loop(band), Loop(band), Loop(band), p};
}

SolvLoopElement SolvLoopElement::constant(const SolvPointC& x, const SolvParams& p, int band) {
  return {Loop::constant(x.x1, band), Loop::constant(x.x2, band), Loop::constant(x.x3, band), p};
}

SolvLoopElement SolvLoopElement::widened(int band) const {
  return {x1.widened(band), x2.widened(band), x3.widened(band), params};
}

SolvPointC SolvLoopElement::eval(Complex lambda) const {
  return {loop_eval(x1, lambda), loop_eval(x2, lambda), loop_eval(x3, lambda)};
}

double max_coeff_distance(const SolvLoopElement& a, const SolvLoopElement& b) {
  double d = 0;
  for (int k = 0; k < 3; ++k) d = std::max(d, max_coeff_distance(a.entry(k), b.entry(k)));
  return d;
}

SolvLoopElement solv_mul(const SolvLoopElement& a, const SolvLoopElement& b, DiscardTally<double>* tally) {
  if (!(a.params == b.params)) throw Error(ErrorKind::ParamMismatch, "solv_mul on different groups");
  const int out = std::max(a.band(), b.band());
  SolvLoopElement r = SolvLoopElement::identity(a.params, out);
  for (int k = 0; k < 2; ++k) {
    const double mu = a.params.mu(k + 1);
    if (mu == 0.0) {
      r.entry(k) = (a.entry(k) + b.entry(k)).widened(out);
      continue;
    }
    const Loop twist = loop_exp(mu * a.x3, out + b.band());
    r.entry(k) = (a.entry(k) + loop_mul(twist, b.entry(k), out, tally)).widened(out);
  }
  r.x3 = (a.x3 + b.x3).widened(out);
  return r;
}

SolvLoopElement solv_inv(const SolvLoopElement& a, DiscardTally<double>* tally) {
  const int n = a.band();
  SolvLoopElement r = SolvLoopElement::identity(a.params, n);
  for (int k = 0; k < 2; ++k) {
    const double mu = a.params.mu(k + 1);
    if (mu == 0.0) {
      r.entry(k) = -a.entry(k);
      continue;
    }
    const Loop twist = loop_exp(-mu * a.x3, 2 * n);
    r.entry(k) = -loop_mul(twist, a.entry(k), n, tally);
  }
  r.x3 = -a.x3;
  return r;
}

// ---------------------------------------------------------------------------

BilinearMap BilinearMap::transposed() const {
  BilinearMap out(dim_);
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) out(k, i, j) = (*this)(k, j, i);
  return out;
}

BilinearMap BilinearMap::symmetric_part() const { return 0.5 * (*this + transposed()); }

BilinearMap BilinearMap::skew_part() const { return 0.5 * (*this - transposed()); }

BilinearMap& BilinearMap::operator+=(const BilinearMap& o) {
  if (o.dim_ != dim_) throw Error(ErrorKind::InvalidArgument, "bilinear map dimension mismatch");
  t_ += o.t_;
  return *this;
}

BilinearMap& BilinearMap::operator-=(const BilinearMap& o) {
  if (o.dim_ != dim_) throw Error(ErrorKind::InvalidArgument, "bilinear map dimension mismatch");
  t_ -= o.t_;
  return *this;
}

BilinearMap& BilinearMap::operator*=(double s) {
  t_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------

LieAlgebraData::LieAlgebraData(BilinearMap structure, std::vector<Eigen::MatrixXcd> basis, double tol)
    : structure_(std::move(structure)), basis_(std::move(basis)) {
  const int n = structure_.dim();
  if (!basis_.empty() && static_cast<int>(basis_.size()) != n)
    throw Error(ErrorKind::InvalidAlgebra, "basis size does not match dimension");
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::abs(structure_(k, i, j) + structure_(k, j, i)) > tol)
          throw Error(ErrorKind::InvalidAlgebra, "structure constants are not antisymmetric");

  // [e_i, [e_j, e_l]] + [e_j, [e_l, e_i]] + [e_l, [e_i, e_j]] = 0
  auto jac = [&](int m, int i, int j, int l) {
    double s = 0;
    for (int p = 0; p < n; ++p)
      s += structure_(p, j, l) * structure_(m, i, p) + structure_(p, l, i) * structure_(m, j, p) +
           structure_(p, i, j) * structure_(m, l, p);
    return s;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          if (std::abs(jac(m, i, j, l)) > tol)
            throw Error(ErrorKind::InvalidAlgebra, "Jacobi identity fails");
}

LieAlgebraData LieAlgebraData::from_matrices(std::vector<Eigen::MatrixXcd> basis, double tol) {
  const int n = static_cast<int>(basis.size());
  if (n == 0) throw Error(ErrorKind::InvalidAlgebra, "empty basis");
  const auto rows = basis[0].size();
  auto flatten = [rows](const Eigen::MatrixXcd& m) {
    Eigen::VectorXd v(2 * rows);
    const Eigen::Map<const Eigen::VectorXcd> flat(m.data(), rows);
    v << flat.real(), flat.imag();
    return v;
  };
  Eigen::MatrixXd cols(2 * rows, n);
  for (int i = 0; i < n; ++i) cols.col(i) = flatten(basis[i]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
  if (qr.rank() < n) throw Error(ErrorKind::InvalidAlgebra, "basis matrices are linearly dependent");

  BilinearMap c(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::MatrixXcd comm = basis[i] * basis[j] - basis[j] * basis[i];
      const Eigen::VectorXd target = flatten(comm);
      const Eigen::VectorXd coeff = qr.solve(target);
      if ((cols * coeff - target).norm() > tol * std::max(1.0, target.norm()))
        throw Error(ErrorKind::InvalidAlgebra, "basis is not closed under the commutator");
      for (int k = 0; k < n; ++k) c(k, i, j) = std::abs(coeff[k]) < 1e-15 ? 0.0 : coeff[k];
    }
  return LieAlgebraData(std::move(c), std::move(basis), tol);
}

Eigen::MatrixXcd LieAlgebraData::to_matrix(const Eigen::VectorXcd& v) const {
  if (!has_representation()) throw Error(ErrorKind::InvalidArgument, "algebra has no matrix representation");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis_[0].rows(), basis_[0].cols());
  for (int i = 0; i < dim(); ++i) m += v[i] * basis_[i];
  return m;
}

namespace {

Eigen::MatrixXcd unit(int n, int r, int c) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  m(r, c) = 1.0;
  return m;
}

}  // namespace

LieAlgebraData solv_algebra(const SolvParams& p) {
  BilinearMap c(3);
  // [e3, e1] = mu1 e1, [e3, e2] = mu2 e2
  c(0, 2, 0) = p.mu1;
  c(0, 0, 2) = -p.mu1;
  c(1, 2, 1) = p.mu2;
  c(1, 1, 2) = -p.mu2;
  if (p.mu1 == 0.0 && p.mu2 == 0.0) return LieAlgebraData(std::move(c));
  std::vector<Eigen::MatrixXcd> basis{unit(3, 0, 2), unit(3, 1, 2),
                                      p.mu1 * unit(3, 0, 0) + p.mu2 * unit(3, 1, 1)};
  return LieAlgebraData(std::move(c), std::move(basis));
}

LieAlgebraData nil_algebra(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Nil_{2n+1} needs n >= 1");
  const int d = 2 * n + 1, m = n + 2;
  BilinearMap c(d);
  std::vector<Eigen::MatrixXcd> basis(d);
  for (int i = 0; i < n; ++i) {
    c(2 * n, i, n + i) = 1.0;
    c(2 * n, n + i, i) = -1.0;
    basis[i] = unit(m, 0, i + 1);
    basis[n + i] = unit(m, i + 1, m - 1);
  }
  basis[2 * n] = unit(m, 0, m - 1);
  return LieAlgebraData(std::move(c), std::move(basis));
}

LieAlgebraData se2_algebra() {
  BilinearMap c(3);
  // [e3, e1] = e2, [e3, e2] = -e1
  c(1, 2, 0) = 1.0;
  c(1, 0, 2) = -1.0;
  c(0, 2, 1) = -1.0;
  c(0, 1, 2) = 1.0;
  std::vector<Eigen::MatrixXcd> basis{unit(3, 0, 2), unit(3, 1, 2), unit(3, 1, 0) - unit(3, 0, 1)};
  return LieAlgebraData(std::move(c), std::move(basis));
}

LieAlgebraData abelian_algebra(int n) {
  std::vector<Eigen::MatrixXcd> basis(n);
  for (int i = 0; i < n; ++i) basis[i] = unit(n + 1, i, n);
  return LieAlgebraData(BilinearMap(n), std::move(basis));
}

// ---------------------------------------------------------------------------

MetricTensor::MetricTensor(Eigen::MatrixXd gram) : g(std::move(gram)) {
  if (g.rows() != g.cols()) throw Error(ErrorKind::SingularMetric, "metric must be square");
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorKind::SingularMetric, "metric must be symmetric");
  if (std::abs(g.determinant()) <= 1e-12) throw Error(ErrorKind::SingularMetric, "metric is degenerate");
}

BilinearMap torsion_tensor(const LieAlgebraData& alg, const ConnectionTensor& conn) {
  return conn.mu - conn.mu.transposed() - alg.structure();
}

ConnectionTensor family_mu(const LieAlgebraData& alg, double t) {
  return {0.5 * (1.0 + t) * alg.structure()};
}

std::pair<ConnectionTensor, ConnectionTensor> sym_skew_parts(const ConnectionTensor& conn) {
  return {{conn.mu.symmetric_part()}, {conn.mu.skew_part()}};
}

ConnectionTensor associated_torsion_free(const LieAlgebraData& alg, const ConnectionTensor& conn) {
  return {conn.mu - 0.5 * torsion_tensor(alg, conn)};
}

ConnectionTensor levi_civita(const LieAlgebraData& alg, const MetricTensor& metric) {
  const int n = alg.dim();
  if (metric.g.rows() != n) throw Error(ErrorKind::SingularMetric, "metric dimension mismatch");
  const Eigen::MatrixXd& g = metric.g;
  // <[e_a, e_b], e_c>
  auto br = [&](int a, int b, int c) {
    double s = 0;
    for (int k = 0; k < n; ++k) s += alg.c(k, a, b) * g(k, c);
    return s;
  };
  const Eigen::MatrixXd ginv = g.inverse();
  BilinearMap mu(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd low(n);
      for (int l = 0; l < n; ++l) low[l] = 0.5 * (br(i, j, l) - br(j, l, i) + br(l, i, j));
      const Eigen::VectorXd up = ginv * low;
      for (int k = 0; k < n; ++k) mu(k, i, j) = up[k];
    }
  return {std::move(mu)};
}

double metric_compatibility_defect(const ConnectionTensor& conn, const MetricTensor& metric) {
  const int n = conn.mu.dim();
  const Eigen::MatrixXd& g = metric.g;
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        double s = 0;
        for (int k = 0; k < n; ++k) s += conn.mu(k, i, j) * g(k, l) + g(j, k) * conn.mu(k, i, l);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

// ---------------------------------------------------------------------------

Eigen::Matrix3cd matrix_exp3(const Eigen::Matrix3cd& a) {
  const Complex zero(0);
  const bool strictly_upper = a(0, 0) == zero && a(1, 1) == zero && a(2, 2) == zero && a(1, 0) == zero &&
                              a(2, 0) == zero && a(2, 1) == zero;
  if (strictly_upper) return Eigen::Matrix3cd::Identity() + a + 0.5 * a * a;

  const bool solv_pattern = a(0, 1) == zero && a(1, 0) == zero && a(2, 0) == zero && a(2, 1) == zero &&
                            a(2, 2) == zero;
  if (solv_pattern) {
    Eigen::Matrix3cd e = Eigen::Matrix3cd::Zero();
    e(0, 0) = std::exp(a(0, 0));
    e(1, 1) = std::exp(a(1, 1));
    e(2, 2) = 1.0;
    e(0, 2) = a(0, 2) * detail::phi1(a(0, 0));
    e(1, 2) = a(1, 2) * detail::phi1(a(1, 1));
    return e;
  }
  return matrix_exp(a);
}

// ---------------------------------------------------------------------------

LieAlgebraData GroupDescriptor::algebra() const {
  switch (kind) {
    case GroupKind::Solv: return solv_algebra(params);
    case GroupKind::Nil: return nil_algebra(nil_n);
    case GroupKind::SE2: return se2_algebra();
  }
  throw Error(ErrorKind::InvalidArgument, "unknown group kind");
}

std::string GroupDescriptor::name() const {
  switch (kind) {
    case GroupKind::Solv: return "G(" + std::to_string(params.mu1) + "," + std::to_string(params.mu2) + ")";
    case GroupKind::Nil: return "Nil_" + std::to_string(2 * nil_n + 1);
    case GroupKind::SE2: return "SE2";
  }
  return "?";
}

Eigen::VectorXcd GroupDescriptor::left_translate(const Eigen::VectorXd& p, const Eigen::VectorXcd& dp) const {
  Eigen::VectorXcd out(dim());
  switch (kind) {
    case GroupKind::Solv:
      out << std::exp(-params.mu1 * p[2]) * dp[0], std::exp(-params.mu2 * p[2]) * dp[1], dp[2];
      break;
    case GroupKind::Nil: {
      // exponential coordinates: phi^{-1} d phi = dX - [X, dX] / 2
      const int n = nil_n;
      out = dp;
      Complex corr(0);
      for (int i = 0; i < n; ++i) corr += p[i] * dp[n + i] - p[n + i] * dp[i];
      out[2 * n] -= 0.5 * corr;
      break;
    }
    case GroupKind::SE2: {
      const double c = std::cos(p[2]), s = std::sin(p[2]);
      out << c * dp[0] + s * dp[1], -s * dp[0] + c * dp[1], dp[2];
      break;
    }
  }
  return out;
}

Eigen::VectorXd GroupDescriptor::coords_from_matrix(const Eigen::MatrixXcd& m) const {
  Eigen::VectorXd x(dim());
  switch (kind) {
    case GroupKind::Solv: {
      if (params.mu1 == 0.0 && params.mu2 == 0.0)
        throw Error(ErrorKind::InvalidArgument, "G(0,0) has no matrix realization");
      const double x3 = params.mu1 != 0.0 ? std::log(m(0, 0).real()) / params.mu1
                                          : std::log(m(1, 1).real()) / params.mu2;
      x << m(0, 2).real(), m(1, 2).real(), x3;
      break;
    }
    case GroupKind::Nil: {
      const int n = nil_n, last = n + 1;
      const Eigen::MatrixXcd nm = m - Eigen::MatrixXcd::Identity(m.rows(), m.cols());
      const Eigen::MatrixXcd lg = nm - 0.5 * nm * nm;
      for (int i = 0; i < n; ++i) {
        x[i] = lg(0, i + 1).real();
        x[n + i] = lg(i + 1, last).real();
      }
      x[2 * n] = lg(0, last).real();
      break;
    }
    case GroupKind::SE2:
      x << m(0, 2).real(), m(1, 2).real(), std::atan2(m(1, 0).real(), m(0, 0).real());
      break;
  }
  return x;
}

Eigen::MatrixXcd GroupDescriptor::matrix_from_coords(const Eigen::VectorXd& x) const {
  switch (kind) {
    case GroupKind::Solv:
      return solv_matrix({x[0], x[1], x[2]}, params);
    case GroupKind::Nil: {
      const Eigen::MatrixXcd a = nil_algebra(nil_n).to_matrix(x.cast<Complex>());
      return Eigen::MatrixXcd::Identity(a.rows(), a.cols()) + a + 0.5 * a * a;
    }
    case GroupKind::SE2: {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(3, 3);
      m(0, 0) = std::cos(x[2]);
      m(0, 1) = -std::sin(x[2]);
      m(1, 0) = std::sin(x[2]);
      m(1, 1) = std::cos(x[2]);
      m(0, 2) = x[0];
      m(1, 2) = x[1];
      return m;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown group kind");
}

}  // namespace loopharm
