#pragma once

// Truncated Laurent series on the unit circle.
//
// A LaurentLoop<Real> of band N stores the 2N+1 coefficients c_{-N..N} of
// f(lambda) = sum_j c_j lambda^j. Everything outside the band is zero by
// convention. Operations that can produce content outside the requested
// output band report the dropped coefficient mass through a DiscardTally.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "loopharm/errors.hpp"

namespace loopharm {

template <typename Real>
class LaurentLoop {
 public:
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  LaurentLoop() : LaurentLoop(0) {}

  explicit LaurentLoop(int band) : band_(band) {
    if (band < 0) throw Error(ErrorKind::InvalidArgument, "negative band");
    coeffs_ = Coeffs::Zero(2 * band + 1);
  }

  /// Coefficients ordered from lambda^{-band} to lambda^{band}.
  LaurentLoop(int band, Coeffs coeffs) : band_(band), coeffs_(std::move(coeffs)) {
    if (band < 0 || coeffs_.size() != 2 * band + 1)
      throw Error(ErrorKind::InvalidArgument, "coefficient vector does not match band");
    for (Eigen::Index i = 0; i < coeffs_.size(); ++i) {
      if (!std::isfinite(coeffs_[i].real()) || !std::isfinite(coeffs_[i].imag()))
        throw Error(ErrorKind::InvalidArgument, "non-finite Laurent coefficient");
    }
  }

  static LaurentLoop constant(Scalar c, int band = 0) {
    LaurentLoop f(band);
    f(0) = c;
    return f;
  }

  /// c * lambda^j; band defaults to |j|.
  static LaurentLoop monomial(int j, Scalar c, int band = -1) {
    LaurentLoop f(band < 0 ? std::abs(j) : band);
    f(j) = c;
    return f;
  }

  int band() const noexcept { return band_; }
  const Coeffs& coeffs() const noexcept { return coeffs_; }
  Coeffs& coeffs_mut() noexcept { return coeffs_; }

  Scalar operator[](int j) const noexcept {
    return (j < -band_ || j > band_) ? Scalar(0) : coeffs_[j + band_];
  }

  Scalar& operator()(int j) {
    if (j < -band_ || j > band_) throw Error(ErrorKind::BandOverflow, "index outside band");
    return coeffs_[j + band_];
  }

  /// Sum of coefficient magnitudes.
  Real mass() const noexcept { return coeffs_.cwiseAbs().sum(); }
  Real max_abs() const noexcept { return band_ < 0 ? Real(0) : coeffs_.cwiseAbs().maxCoeff(); }

  /// Lowest / highest index carrying a nonzero coefficient; (1, 0) for the zero loop.
  int support_lo() const noexcept {
    for (int j = -band_; j <= band_; ++j)
      if (coeffs_[j + band_] != Scalar(0)) return j;
    return 1;
  }
  int support_hi() const noexcept {
    for (int j = band_; j >= -band_; --j)
      if (coeffs_[j + band_] != Scalar(0)) return j;
    return 0;
  }
  bool is_zero() const noexcept { return support_lo() > support_hi(); }

  /// Same loop with a larger band (zero padding).
  LaurentLoop widened(int band) const {
    if (band <= band_) return *this;
    LaurentLoop out(band);
    out.coeffs_.segment(band - band_, 2 * band_ + 1) = coeffs_;
    return out;
  }

  template <typename Other>
  LaurentLoop<Other> cast() const {
    typename LaurentLoop<Other>::Coeffs c(coeffs_.size());
    for (Eigen::Index i = 0; i < c.size(); ++i)
      c[i] = std::complex<Other>(static_cast<Other>(coeffs_[i].real()),
                                 static_cast<Other>(coeffs_[i].imag()));
    return LaurentLoop<Other>(band_, std::move(c));
  }

  LaurentLoop& operator+=(const LaurentLoop& g) {
    if (g.band_ > band_) *this = widened(g.band_);
    coeffs_.segment(band_ - g.band_, 2 * g.band_ + 1) += g.coeffs_;
    return *this;
  }
  LaurentLoop& operator-=(const LaurentLoop& g) {
    if (g.band_ > band_) *this = widened(g.band_);
    coeffs_.segment(band_ - g.band_, 2 * g.band_ + 1) -= g.coeffs_;
    return *this;
  }
  LaurentLoop& operator*=(Scalar s) {
    coeffs_ *= s;
    return *this;
  }

 private:
  int band_;
  Coeffs coeffs_;
};

using Loop = LaurentLoop<double>;
using Complex = std::complex<double>;

/// Accumulates the coefficient mass dropped by truncating operations.
template <typename Real>
struct DiscardTally {
  Real mass = 0;
  void add(Real m) noexcept { mass += m; }
};

template <typename Real>
struct ExpOptions {
  Real tol = Real(1e-14);
  int max_terms = 64;
  /// Upper bound on the internal working band used for two-sided exponentials.
  int max_working_band = 1024;
};

// ---------------------------------------------------------------------------
// Ring operations

template <typename Real>
LaurentLoop<Real> operator+(LaurentLoop<Real> f, const LaurentLoop<Real>& g) {
  return f += g;
}

template <typename Real>
LaurentLoop<Real> operator-(LaurentLoop<Real> f, const LaurentLoop<Real>& g) {
  return f -= g;
}

template <typename Real>
LaurentLoop<Real> operator-(LaurentLoop<Real> f) {
  return f *= std::complex<Real>(-1);
}

template <typename Real>
LaurentLoop<Real> operator*(std::complex<Real> s, LaurentLoop<Real> f) {
  return f *= s;
}

template <typename Real>
LaurentLoop<Real> operator*(Real s, LaurentLoop<Real> f) {
  return f *= std::complex<Real>(s);
}

/// Coefficient-wise sum; the band of the result is max(N_f, N_g).
template <typename Real>
LaurentLoop<Real> loop_add(const LaurentLoop<Real>& f, const LaurentLoop<Real>& g) {
  return f + g;
}

/// Truncated convolution onto [-out_band, out_band].
template <typename Real>
LaurentLoop<Real> loop_mul(const LaurentLoop<Real>& f, const LaurentLoop<Real>& g, int out_band,
                           DiscardTally<Real>* tally = nullptr) {
  if (out_band < 0) throw Error(ErrorKind::InvalidArgument, "negative output band");
  using Scalar = std::complex<Real>;
  LaurentLoop<Real> out(out_band);
  const int flo = f.support_lo(), fhi = f.support_hi();
  const int glo = g.support_lo(), ghi = g.support_hi();
  if (flo > fhi || glo > ghi) return out;

  const auto& fc = f.coeffs();
  const auto& gc = g.coeffs();
  const int fb = f.band(), gb = g.band();
  Real dropped = 0;
  Scalar* oc = out.coeffs_mut().data();
  for (int p = flo; p <= fhi; ++p) {
    const Scalar fp = fc[p + fb];
    if (fp == Scalar(0)) continue;
    const int qlo = std::max(glo, -out_band - p);
    const int qhi = std::min(ghi, out_band - p);
    for (int q = qlo; q <= qhi; ++q) oc[p + q + out_band] += fp * gc[q + gb];
  }
  if (tally) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> outside =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(fhi + ghi - flo - glo + 1);
    for (int p = flo; p <= fhi; ++p) {
      const Scalar fp = fc[p + fb];
      if (fp == Scalar(0)) continue;
      for (int q = glo; q <= ghi; ++q) {
        const int j = p + q;
        if (j < -out_band || j > out_band) outside[j - flo - glo] += fp * gc[q + gb];
      }
    }
    dropped = outside.cwiseAbs().sum();
    tally->add(dropped);
  }
  return out;
}

/// Keeps coefficients with lo <= j <= hi; the band is unchanged.
template <typename Real>
LaurentLoop<Real> project_band(const LaurentLoop<Real>& f, int lo, int hi) {
  if (lo > hi) throw Error(ErrorKind::InvalidArgument, "project_band requires lo <= hi");
  LaurentLoop<Real> out(f.band());
  const int a = std::max(lo, -f.band()), b = std::min(hi, f.band());
  for (int j = a; j <= b; ++j) out(j) = f[j];
  return out;
}

/// Restricts to a smaller band, reporting the dropped mass.
template <typename Real>
LaurentLoop<Real> truncated(const LaurentLoop<Real>& f, int band, DiscardTally<Real>* tally = nullptr) {
  if (band >= f.band()) return f.widened(band);
  LaurentLoop<Real> out(band);
  for (int j = -band; j <= band; ++j) out(j) = f[j];
  if (tally) tally->add(f.mass() - out.mass());
  return out;
}

/// g_j = conj(f_{-j}); pointwise conjugation on |lambda| = 1.
template <typename Real>
LaurentLoop<Real> conj_reflect(const LaurentLoop<Real>& f) {
  LaurentLoop<Real> out(f.band());
  for (int j = -f.band(); j <= f.band(); ++j) out(j) = std::conj(f[-j]);
  return out;
}

/// (f + conj_reflect(f)) / 2.
template <typename Real>
LaurentLoop<Real> real_part(const LaurentLoop<Real>& f) {
  LaurentLoop<Real> out(f.band());
  for (int j = -f.band(); j <= f.band(); ++j) out(j) = Real(0.5) * (f[j] + std::conj(f[-j]));
  return out;
}

/// Horner evaluation in lambda and 1/lambda.
template <typename Real>
std::complex<Real> loop_eval(const LaurentLoop<Real>& f, std::complex<Real> lambda) {
  using Scalar = std::complex<Real>;
  if (lambda == Scalar(0)) throw Error(ErrorKind::ZeroArgument, "loop evaluated at lambda = 0");
  const int n = f.band();
  Scalar pos(0);
  for (int j = n; j >= 0; --j) pos = pos * lambda + f[j];
  if (n == 0) return pos;
  const Scalar inv = Scalar(1) / lambda;
  Scalar neg(0);
  for (int j = n; j >= 1; --j) neg = neg * inv + f[-j];
  return pos + neg * inv;
}

/// Max coefficient distance, zero-padding the narrower loop.
template <typename Real>
Real max_coeff_distance(const LaurentLoop<Real>& f, const LaurentLoop<Real>& g) {
  const int n = std::max(f.band(), g.band());
  Real d = 0;
  for (int j = -n; j <= n; ++j) d = std::max(d, std::abs(f[j] - g[j]));
  return d;
}

namespace detail {

// Taylor series of a one-sided loop. Powers of a one-sided loop never bring
// truncated content back into the band, so the result is exact on the band
// once the added terms drop below tolerance.
template <typename Real>
LaurentLoop<Real> exp_one_sided(const LaurentLoop<Real>& f, int band, const ExpOptions<Real>& opt,
                                DiscardTally<Real>* tally) {
  using Scalar = std::complex<Real>;
  LaurentLoop<Real> result = LaurentLoop<Real>::constant(Scalar(1), band);
  LaurentLoop<Real> term = result;
  for (int m = 1;; ++m) {
    term = loop_mul(term, f, band, tally);
    term *= Scalar(Real(1) / Real(m));
    result += term;
    const Real scale = std::max(Real(1), result.mass());
    if (term.mass() < opt.tol * scale) return result;
    if (m >= opt.max_terms)
      throw Error(ErrorKind::NonConvergent,
                  "exponential Taylor series did not reach tolerance within " +
                      std::to_string(opt.max_terms) + " terms");
  }
}

template <typename Real>
Real edge_mass(const LaurentLoop<Real>& f, int width) {
  Real m = 0;
  const int n = f.band();
  for (int j = std::max(0, n - width + 1); j <= n; ++j) m += std::abs(f[j]) + (j ? std::abs(f[-j]) : Real(0));
  return m;
}

}  // namespace detail

/// exp(f) truncated to out_band.
///
/// The loop is split as f = c + f_- + f_+ with one-sided parts; since scalar
/// loops commute, exp(f) = e^c exp(f_-) exp(f_+). Each one-sided factor is an
/// exact Taylor sum on its band. For two-sided input the factors are built on
/// a working band grown until their edge coefficients are below tolerance, so
/// the truncated product is accurate on [-out_band, out_band].
template <typename Real>
LaurentLoop<Real> loop_exp(const LaurentLoop<Real>& f, int out_band, DiscardTally<Real>* tally = nullptr,
                           const ExpOptions<Real>& opt = {}) {
  using Scalar = std::complex<Real>;
  if (out_band < 0) throw Error(ErrorKind::InvalidArgument, "negative output band");
  const int n = f.band();
  const Scalar c0 = std::exp(f[0]);
  const LaurentLoop<Real> neg = n > 0 ? project_band(f, -n, -1) : LaurentLoop<Real>(0);
  const LaurentLoop<Real> pos = n > 0 ? project_band(f, 1, n) : LaurentLoop<Real>(0);
  const bool has_neg = !neg.is_zero(), has_pos = !pos.is_zero();

  if (!has_neg && !has_pos) return LaurentLoop<Real>::constant(c0, out_band);
  if (has_neg != has_pos) {
    LaurentLoop<Real> e = detail::exp_one_sided(has_neg ? neg : pos, out_band, opt, tally);
    return e *= c0;
  }

  const int width = std::max(n, 1);
  int working = 2 * out_band + 2 * width + 8;
  for (;;) {
    const LaurentLoop<Real> eneg = detail::exp_one_sided<Real>(neg, working, opt, nullptr);
    const LaurentLoop<Real> epos = detail::exp_one_sided<Real>(pos, working, opt, nullptr);
    const Real scale = std::max(Real(1), std::max(eneg.mass(), epos.mass()));
    const bool settled = detail::edge_mass(eneg, width) < opt.tol * scale &&
                         detail::edge_mass(epos, width) < opt.tol * scale;
    if (settled || working >= opt.max_working_band) {
      if (!settled)
        throw Error(ErrorKind::NonConvergent,
                    "two-sided exponential did not settle within working band " + std::to_string(working));
      LaurentLoop<Real> e = loop_mul(eneg, epos, out_band, tally);
      return e *= c0;
    }
    working = std::min(2 * working, opt.max_working_band);
  }
}

}  // namespace loopharm
