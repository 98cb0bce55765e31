#include "loopharm/polynomial.hpp"

#include <cmath>
#include <string>

namespace loopharm {

HoloPoly::HoloPoly(Coeffs a) : a_(std::move(a)) {
  if (a_.size() == 0) a_ = Coeffs::Zero(1);
  for (Eigen::Index i = 0; i < a_.size(); ++i)
    if (!std::isfinite(a_[i].real()) || !std::isfinite(a_[i].imag()))
      throw Error(ErrorKind::InvalidArgument, "non-finite polynomial coefficient");
  trim();
}

HoloPoly::HoloPoly(std::initializer_list<Complex> a) : HoloPoly([&] {
    Coeffs c(static_cast<Eigen::Index>(a.size()));
    Eigen::Index i = 0;
    for (const Complex& v : a) c[i++] = v;
    return c;
  }()) {}

HoloPoly HoloPoly::identity() { return HoloPoly{Complex(0), Complex(1)}; }

void HoloPoly::trim() {
  Eigen::Index n = a_.size();
  while (n > 1 && a_[n - 1] == Complex(0)) --n;
  if (n != a_.size()) a_.conservativeResize(n);
}

HoloPoly::Complex HoloPoly::operator()(Complex z) const {
  Complex acc(0);
  for (Eigen::Index m = a_.size() - 1; m >= 0; --m) acc = acc * z + a_[m];
  return acc;
}

HoloPoly HoloPoly::derivative() const {
  if (a_.size() == 1) return {};
  Coeffs d(a_.size() - 1);
  for (Eigen::Index m = 1; m < a_.size(); ++m) d[m - 1] = static_cast<double>(m) * a_[m];
  return HoloPoly(std::move(d));
}

HoloPoly HoloPoly::antiderivative() const {
  Coeffs d = Coeffs::Zero(a_.size() + 1);
  for (Eigen::Index m = 0; m < a_.size(); ++m) d[m + 1] = a_[m] / static_cast<double>(m + 1);
  return HoloPoly(std::move(d));
}

HoloPoly HoloPoly::shifted(Complex z0) const {
  // Repeated synthetic division (Taylor shift).
  Coeffs c = a_;
  const Eigen::Index n = c.size();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = n - 2; j >= i; --j) c[j] += z0 * c[j + 1];
  return HoloPoly(std::move(c));
}

HoloPoly HoloPoly::conjugated() const { return HoloPoly(Coeffs(a_.conjugate())); }

HoloPoly& HoloPoly::operator+=(const HoloPoly& o) {
  if (o.a_.size() > a_.size()) a_.conservativeResizeLike(Coeffs::Zero(o.a_.size()));
  a_.head(o.a_.size()) += o.a_;
  trim();
  return *this;
}

HoloPoly& HoloPoly::operator-=(const HoloPoly& o) {
  if (o.a_.size() > a_.size()) a_.conservativeResizeLike(Coeffs::Zero(o.a_.size()));
  a_.head(o.a_.size()) -= o.a_;
  trim();
  return *this;
}

HoloPoly& HoloPoly::operator*=(Complex s) {
  a_ *= s;
  if (s == Complex(0)) a_ = Coeffs::Zero(1);
  return *this;
}

void HoloPoly::require_input_degree() const {
  if (degree() > kMaxInputDegree)
    throw Error(ErrorKind::InvalidArgument, "polynomial degree " + std::to_string(degree()) + " exceeds " +
                                                std::to_string(kMaxInputDegree));
}

HoloPoly operator+(HoloPoly a, const HoloPoly& b) { return a += b; }
HoloPoly operator-(HoloPoly a, const HoloPoly& b) { return a -= b; }
HoloPoly operator*(std::complex<double> s, HoloPoly a) { return a *= s; }

HoloPoly operator*(const HoloPoly& a, const HoloPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  HoloPoly::Coeffs c = HoloPoly::Coeffs::Zero(a.degree() + b.degree() + 1);
  for (int i = 0; i <= a.degree(); ++i)
    for (int j = 0; j <= b.degree(); ++j) c[i + j] += a[i] * b[j];
  return HoloPoly(std::move(c));
}

}  // namespace loopharm
