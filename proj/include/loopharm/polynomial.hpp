#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "loopharm/errors.hpp"

namespace loopharm {

/// Complex polynomial p(z) = sum_m a_m z^m, coefficients lowest degree first.
class HoloPoly {
 public:
  using Complex = std::complex<double>;
  using Coeffs = Eigen::VectorXcd;

  /// Largest degree accepted from user input.
  static constexpr int kMaxInputDegree = 64;

  HoloPoly() : a_(Coeffs::Zero(1)) {}
  explicit HoloPoly(Coeffs a);
  HoloPoly(std::initializer_list<Complex> a);

  static HoloPoly constant(Complex c) { return HoloPoly(Coeffs::Constant(1, c)); }
  /// p(z) = z
  static HoloPoly identity();

  /// Degree after trimming trailing zeros; 0 for the zero polynomial.
  int degree() const noexcept { return static_cast<int>(a_.size()) - 1; }
  const Coeffs& coeffs() const noexcept { return a_; }
  Complex operator[](int m) const noexcept { return m < a_.size() && m >= 0 ? a_[m] : Complex(0); }
  bool is_zero() const noexcept { return a_.size() == 1 && a_[0] == Complex(0); }

  Complex operator()(Complex z) const;
  HoloPoly derivative() const;
  /// Antiderivative vanishing at 0.
  HoloPoly antiderivative() const;
  /// q(s) = p(s + z0)
  HoloPoly shifted(Complex z0) const;
  /// z -> conj(p(conj z))
  HoloPoly conjugated() const;

  HoloPoly& operator+=(const HoloPoly& o);
  HoloPoly& operator-=(const HoloPoly& o);
  HoloPoly& operator*=(Complex s);

  /// Throws InvalidArgument if the degree exceeds kMaxInputDegree.
  void require_input_degree() const;

 private:
  void trim();
  Coeffs a_;
};

HoloPoly operator+(HoloPoly a, const HoloPoly& b);
HoloPoly operator-(HoloPoly a, const HoloPoly& b);
HoloPoly operator*(std::complex<double> s, HoloPoly a);
HoloPoly operator*(const HoloPoly& a, const HoloPoly& b);

}  // namespace loopharm
