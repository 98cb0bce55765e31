#pragma once

// Concrete Lie groups and algebras: the solvable family G(mu1, mu2), the
// Heisenberg groups Nil_{2n+1} and SE(2); structure constants, left-invariant
// connections, torsion, Levi-Civita connections and matrix exponentials.

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "loopharm/errors.hpp"
#include "loopharm/laurent.hpp"

namespace loopharm {

// ---------------------------------------------------------------------------
// G(mu1, mu2)

/// (0, 0) is allowed and is the abelian group R^3.
struct SolvParams {
  double mu1 = 0;
  double mu2 = 0;

  double mu(int k) const noexcept { return k == 1 ? mu1 : mu2; }
  bool operator==(const SolvParams&) const = default;
};

/// Coordinates (x1, x2, x3) of the matrix
///   [ e^{mu1 x3}  0           x1 ]
///   [ 0           e^{mu2 x3}  x2 ]
///   [ 0           0           1  ]
template <typename T>
struct SolvCoords {
  T x1{}, x2{}, x3{};

  T& operator[](int k) { return k == 0 ? x1 : (k == 1 ? x2 : x3); }
  const T& operator[](int k) const { return k == 0 ? x1 : (k == 1 ? x2 : x3); }
};

using SolvPoint = SolvCoords<double>;
using SolvPointC = SolvCoords<Complex>;

/// (x1 + e^{mu1 x3} y1, x2 + e^{mu2 x3} y2, x3 + y3)
template <typename T>
SolvCoords<T> solv_mul(const SolvCoords<T>& a, const SolvCoords<T>& b, const SolvParams& p) {
  using std::exp;
  return {a.x1 + exp(T(p.mu1) * a.x3) * b.x1, a.x2 + exp(T(p.mu2) * a.x3) * b.x2, a.x3 + b.x3};
}

template <typename T>
SolvCoords<T> solv_inv(const SolvCoords<T>& a, const SolvParams& p) {
  using std::exp;
  return {-exp(-T(p.mu1) * a.x3) * a.x1, -exp(-T(p.mu2) * a.x3) * a.x2, -a.x3};
}

/// The 3x3 matrix of a (complexified) point.
Eigen::Matrix3cd solv_matrix(const SolvPointC& x, const SolvParams& p);

/// exp(v1 e1 + v2 e2 + v3 e3) in group coordinates, valid for every (mu1, mu2).
SolvPoint solv_exp(const Eigen::Vector3d& v, const SolvParams& p);

/// A loop in G(mu1, mu2)^C: three Laurent loops sharing one band.
struct SolvLoopElement {
  Loop x1, x2, x3;
  SolvParams params;

  SolvLoopElement() = default;
  SolvLoopElement(Loop a, Loop b, Loop c, SolvParams p);

  static SolvLoopElement identity(const SolvParams& p, int band);
  /// The constant loop at a group point.
  static SolvLoopElement constant(const SolvPointC& x, const SolvParams& p, int band);

  int band() const noexcept { return x1.band(); }
  const Loop& entry(int k) const { return k == 0 ? x1 : (k == 1 ? x2 : x3); }
  Loop& entry(int k) { return k == 0 ? x1 : (k == 1 ? x2 : x3); }

  SolvLoopElement widened(int band) const;
  SolvPointC eval(Complex lambda) const;
};

/// Max coefficient distance over the three entries.
double max_coeff_distance(const SolvLoopElement& a, const SolvLoopElement& b);

/// Group product of loops; the result band is the larger of the two bands.
SolvLoopElement solv_mul(const SolvLoopElement& a, const SolvLoopElement& b,
                         DiscardTally<double>* tally = nullptr);
SolvLoopElement solv_inv(const SolvLoopElement& a, DiscardTally<double>* tally = nullptr);

// ---------------------------------------------------------------------------
// Bilinear maps on an algebra

/// A bilinear map g x g -> g in a fixed basis: B(e_i, e_j) = sum_k b(k, i, j) e_k.
class BilinearMap {
 public:
  BilinearMap() = default;
  explicit BilinearMap(int dim) : dim_(dim), t_(Eigen::VectorXd::Zero(dim * dim * dim)) {}

  int dim() const noexcept { return dim_; }
  double operator()(int k, int i, int j) const { return t_[(k * dim_ + i) * dim_ + j]; }
  double& operator()(int k, int i, int j) { return t_[(k * dim_ + i) * dim_ + j]; }
  const Eigen::VectorXd& flat() const noexcept { return t_; }

  template <typename DX, typename DY>
  Eigen::Matrix<typename Eigen::ScalarBinaryOpTraits<typename DX::Scalar, typename DY::Scalar>::ReturnType,
                Eigen::Dynamic, 1>
  apply(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) const {
    using S = typename Eigen::ScalarBinaryOpTraits<typename DX::Scalar, typename DY::Scalar>::ReturnType;
    Eigen::Matrix<S, Eigen::Dynamic, 1> out = Eigen::Matrix<S, Eigen::Dynamic, 1>::Zero(dim_);
    for (int k = 0; k < dim_; ++k)
      for (int i = 0; i < dim_; ++i) {
        if (x[i] == typename DX::Scalar(0)) continue;
        for (int j = 0; j < dim_; ++j) {
          const double b = (*this)(k, i, j);
          if (b != 0.0) out[k] += S(b) * S(x[i]) * S(y[j]);
        }
      }
    return out;
  }

  /// (B(X,Y) + B(Y,X)) / 2 and (B(X,Y) - B(Y,X)) / 2.
  BilinearMap symmetric_part() const;
  BilinearMap skew_part() const;
  /// (X, Y) -> B(Y, X)
  BilinearMap transposed() const;

  BilinearMap& operator+=(const BilinearMap& o);
  BilinearMap& operator-=(const BilinearMap& o);
  BilinearMap& operator*=(double s);
  double max_abs() const { return dim_ == 0 ? 0.0 : t_.cwiseAbs().maxCoeff(); }

 private:
  int dim_ = 0;
  Eigen::VectorXd t_;
};

inline BilinearMap operator+(BilinearMap a, const BilinearMap& b) { return a += b; }
inline BilinearMap operator-(BilinearMap a, const BilinearMap& b) { return a -= b; }
inline BilinearMap operator*(double s, BilinearMap a) { return a *= s; }

/// A left-invariant connection nabla_X Y = mu(X, Y).
struct ConnectionTensor {
  BilinearMap mu;
};

/// Finite-dimensional real Lie algebra given by structure constants
/// [e_i, e_j] = sum_k c(k, i, j) e_k, optionally with a matrix representation.
class LieAlgebraData {
 public:
  /// Validates antisymmetry and the Jacobi identity; throws InvalidAlgebra.
  explicit LieAlgebraData(BilinearMap structure, std::vector<Eigen::MatrixXcd> basis = {},
                          double tol = 1e-12);

  /// Structure constants read off a basis of matrices (must close under commutators).
  static LieAlgebraData from_matrices(std::vector<Eigen::MatrixXcd> basis, double tol = 1e-12);

  int dim() const noexcept { return structure_.dim(); }
  const BilinearMap& structure() const noexcept { return structure_; }
  double c(int k, int i, int j) const { return structure_(k, i, j); }

  template <typename DX, typename DY>
  auto bracket(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) const {
    return structure_.apply(x, y);
  }

  bool has_representation() const noexcept { return !basis_.empty(); }
  const std::vector<Eigen::MatrixXcd>& basis_matrices() const noexcept { return basis_; }
  Eigen::MatrixXcd to_matrix(const Eigen::VectorXcd& v) const;

 private:
  BilinearMap structure_;
  std::vector<Eigen::MatrixXcd> basis_;
};

/// Basis (E13, E23, mu1 E11 + mu2 E22), matching the coordinates (x1, x2, x3).
/// No matrix representation is attached when mu1 = mu2 = 0.
LieAlgebraData solv_algebra(const SolvParams& p);
/// Heisenberg algebra of Nil_{2n+1}: [e_i, e_{n+i}] = e_{2n+1}; basis E_{1,i+1}, E_{i+1,n+2}, E_{1,n+2}.
LieAlgebraData nil_algebra(int n = 1);
/// se(2) with basis (E13, E23, E21 - E12).
LieAlgebraData se2_algebra();
/// R^n represented by translations in (n+1)x(n+1) matrices.
LieAlgebraData abelian_algebra(int n);

/// Symmetric nondegenerate bilinear form on the algebra.
struct MetricTensor {
  Eigen::MatrixXd g;

  /// Throws SingularMetric when g is not symmetric or |det g| <= 1e-12.
  explicit MetricTensor(Eigen::MatrixXd gram);
  static MetricTensor identity(int n) { return MetricTensor(Eigen::MatrixXd::Identity(n, n)); }
};

/// T(X, Y) = -[X, Y] + mu(X, Y) - mu(Y, X)
template <typename DX, typename DY>
auto torsion(const LieAlgebraData& alg, const ConnectionTensor& conn, const Eigen::MatrixBase<DX>& x,
             const Eigen::MatrixBase<DY>& y) {
  return (-alg.bracket(x, y) + conn.mu.apply(x, y) - conn.mu.apply(y, x)).eval();
}

/// The torsion as a bilinear map.
BilinearMap torsion_tensor(const LieAlgebraData& alg, const ConnectionTensor& conn);

/// mu_t(X, Y) = (1 + t) [X, Y] / 2; t = -1 canonical, 0 neutral, 1 anti-canonical.
ConnectionTensor family_mu(const LieAlgebraData& alg, double t);

std::pair<ConnectionTensor, ConnectionTensor> sym_skew_parts(const ConnectionTensor& conn);

/// Torsion-free connection associated with nabla^mu: mu - T^mu / 2.
ConnectionTensor associated_torsion_free(const LieAlgebraData& alg, const ConnectionTensor& conn);

/// Levi-Civita connection of a left-invariant metric, from the Koszul formula
/// <nabla_X Y, Z> = (<[X,Y],Z> - <[Y,Z],X> + <[Z,X],Y>) / 2.
ConnectionTensor levi_civita(const LieAlgebraData& alg, const MetricTensor& metric);

/// max |<mu(e_i, e_j), e_l> + <e_j, mu(e_i, e_l)>| over basis triples.
double metric_compatibility_defect(const ConnectionTensor& conn, const MetricTensor& metric);

// ---------------------------------------------------------------------------
// Matrix exponential

namespace detail {

// Scaling and squaring with an 18-term Taylor polynomial at scaled norm <= 1/2.
template <typename Plain>
Plain expm_taylor(const Plain& a) {
  using RealScalar = typename Eigen::NumTraits<typename Plain::Scalar>::Real;
  const RealScalar norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  if (norm > RealScalar(0.5)) s = static_cast<int>(std::ceil(std::log2(norm / RealScalar(0.5))));
  const Plain b = a / std::pow(RealScalar(2), s);
  const auto n = a.rows();
  Plain t = Plain::Identity(n, n);
  for (int k = 18; k >= 1; --k) t = Plain::Identity(n, n) + (b * t) / RealScalar(k);
  for (int i = 0; i < s; ++i) t = (t * t).eval();
  return t;
}

template <typename S>
S phi1(S d) {
  // (e^d - 1) / d
  if (std::abs(d) < 1e-5) return S(1) + d / S(2) + d * d / S(6) + d * d * d / S(24);
  return (std::exp(d) - S(1)) / d;
}

}  // namespace detail

/// General dense matrix exponential.
template <typename Derived>
typename Derived::PlainObject matrix_exp(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  return detail::expm_taylor<Plain>(a.eval());
}

/// 3x3 exponential with closed forms for nilpotent (strictly upper triangular)
/// input and for the G(mu1, mu2) algebra pattern.
Eigen::Matrix3cd matrix_exp3(const Eigen::Matrix3cd& a);

// ---------------------------------------------------------------------------
// Group descriptors used by the verification layer

enum class GroupKind { Solv, Nil, SE2 };

struct GroupDescriptor {
  GroupKind kind = GroupKind::Solv;
  SolvParams params{};
  int nil_n = 1;

  int dim() const noexcept { return kind == GroupKind::Nil ? 2 * nil_n + 1 : 3; }
  LieAlgebraData algebra() const;
  std::string name() const;

  /// Algebra components of phi^{-1} d phi given coordinates p and a
  /// coordinate derivative dp (any direction, possibly complex).
  Eigen::VectorXcd left_translate(const Eigen::VectorXd& p, const Eigen::VectorXcd& dp) const;

  /// Group coordinates of a matrix in the descriptor's representation.
  Eigen::VectorXd coords_from_matrix(const Eigen::MatrixXcd& m) const;
  Eigen::MatrixXcd matrix_from_coords(const Eigen::VectorXd& x) const;
};

inline GroupDescriptor solv_group(const SolvParams& p) { return {GroupKind::Solv, p, 1}; }
inline GroupDescriptor nil_group(int n = 1) { return {GroupKind::Nil, {}, n}; }
inline GroupDescriptor se2_group() { return {GroupKind::SE2, {}, 1}; }

}  // namespace loopharm
