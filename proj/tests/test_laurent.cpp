#include <doctest.h>

#include <random>

#include "loopharm/laurent.hpp"

using namespace loopharm;

namespace {

Loop random_loop(std::mt19937_64& rng, int band, int lo, int hi) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Loop f(band);
  for (int j = lo; j <= hi; ++j) f(j) = Complex(u(rng), u(rng));
  return f;
}

// Coefficients of exp(f) recovered from pointwise values at M roots of unity.
std::vector<std::complex<long double>> dft_exp_coeffs(const Loop& f, int band, int m) {
  using LC = std::complex<long double>;
  const long double two_pi = 2.0L * 3.14159265358979323846264338327950288L;
  std::vector<LC> samples(m);
  for (int s = 0; s < m; ++s) {
    const LC lam = std::polar(1.0L, two_pi * s / m);
    LC v(0);
    for (int j = -f.band(); j <= f.band(); ++j) {
      const LC c(f[j].real(), f[j].imag());
      v += c * std::pow(lam, j);
    }
    samples[s] = std::exp(v);
  }
  std::vector<LC> out(2 * band + 1);
  for (int j = -band; j <= band; ++j) {
    LC acc(0);
    for (int s = 0; s < m; ++s) acc += samples[s] * std::polar(1.0L, -two_pi * s * j / m);
    out[j + band] = acc / static_cast<long double>(m);
  }
  return out;
}

std::complex<long double> naive_eval(const Loop& f, Complex lambda) {
  using LC = std::complex<long double>;
  const LC lam(lambda.real(), lambda.imag());
  LC acc(0);
  for (int j = -f.band(); j <= f.band(); ++j) acc += LC(f[j].real(), f[j].imag()) * std::pow(lam, j);
  return acc;
}

}  // namespace

TEST_CASE("band bookkeeping and construction") {
  CHECK_THROWS_AS(Loop(-1), Error);
  CHECK_THROWS_AS(Loop(2, Loop::Coeffs::Zero(4)), Error);
  Loop::Coeffs bad = Loop::Coeffs::Zero(3);
  bad[1] = Complex(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(Loop(1, bad), Error);

  Loop f = Loop::monomial(-2, 3.0);
  CHECK(f.band() == 2);
  CHECK(f[-2] == Complex(3.0));
  CHECK(f[5] == Complex(0.0));
  CHECK_THROWS_AS(f(3), Error);
}

TEST_CASE("loop_add") {
  const Loop a = Loop::monomial(-1, 1.0), b = Loop::monomial(1, 1.0);
  const Loop s = loop_add(a, b);
  CHECK(s.band() == 1);
  CHECK(s[-1] == Complex(1));
  CHECK(s[1] == Complex(1));
  CHECK(s[0] == Complex(0));

  Loop p(1), q(1);
  p(0) = 1.0;
  p(1) = 1.0;
  q(0) = 1.0;
  q(1) = -1.0;
  const Loop r = loop_add(p, q);
  CHECK(r[0] == Complex(2));
  CHECK(r[1] == Complex(0));

  std::mt19937_64 rng(1);
  const Loop f = random_loop(rng, 3, -3, 3);
  CHECK(max_coeff_distance(loop_add(f, Loop(0)), f) == 0.0);
}

TEST_CASE("loop_mul truncation and discarded mass") {
  CHECK(loop_mul(Loop::monomial(-1, 1.0), Loop::monomial(1, 1.0), 0)[0] == Complex(1));

  Loop one_plus(1);
  one_plus(0) = 1.0;
  one_plus(1) = 1.0;
  const Loop sq = loop_mul(one_plus, one_plus, 2);
  CHECK(sq[0] == Complex(1));
  CHECK(sq[1] == Complex(2));
  CHECK(sq[2] == Complex(1));

  Loop sym(1);
  sym(-1) = 1.0;
  sym(1) = 1.0;
  DiscardTally<double> tally;
  const Loop t = loop_mul(sym, sym, 1, &tally);
  CHECK(t[0] == Complex(2));
  CHECK(t[1] == Complex(0));
  CHECK(t[-1] == Complex(0));
  CHECK(tally.mass == doctest::Approx(2.0));
  CHECK_THROWS_AS(loop_mul(sym, sym, -1), Error);
}

TEST_CASE("ring axioms without truncation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Loop f = random_loop(rng, 2, -2, 2), g = random_loop(rng, 2, -2, 2), h = random_loop(rng, 2, -2, 2);
    const int n = 6;
    const Loop lhs = loop_mul(loop_mul(f, g, n), h, n);
    const Loop rhs = loop_mul(f, loop_mul(g, h, n), n);
    CHECK(max_coeff_distance(lhs, rhs) < 1e-14);
    const Loop d1 = loop_mul(f, g + h, n);
    const Loop d2 = loop_mul(f, g, n) + loop_mul(f, h, n);
    CHECK(max_coeff_distance(d1, d2) < 1e-14);
    // conj_reflect is multiplicative
    const Loop c1 = conj_reflect(loop_mul(f, g, n));
    const Loop c2 = loop_mul(conj_reflect(f), conj_reflect(g), n);
    CHECK(max_coeff_distance(c1, c2) < 1e-14);
  }
}

TEST_CASE("loop_exp exact one-sided cases") {
  CHECK(max_coeff_distance(loop_exp(Loop(3), 3), Loop::constant(1.0, 3)) == 0.0);

  const Complex a(0.7, -0.3);
  const Loop e = loop_exp(Loop::monomial(-1, a), 3);
  CHECK(std::abs(e[0] - 1.0) < 1e-15);
  CHECK(std::abs(e[-1] - a) < 1e-15);
  CHECK(std::abs(e[-2] - a * a / 2.0) < 1e-15);
  CHECK(std::abs(e[-3] - a * a * a / 6.0) < 1e-15);
  CHECK(e[1] == Complex(0));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Loop f = random_loop(rng, 6, -6, -1);
    const Loop prod = loop_mul(loop_exp(f, 12), loop_exp(-f, 12), 12);
    CHECK(max_coeff_distance(prod, Loop::constant(1.0, 12)) < 1e-13);
  }
}

TEST_CASE("loop_exp matches Bessel coefficients from pointwise DFT") {
  Loop f(1);
  f(-1) = 1.0;
  f(1) = 1.0;
  const Loop e = loop_exp(f, 4);
  const auto oracle = dft_exp_coeffs(f, 4, 256);
  for (int j = -4; j <= 4; ++j) {
    const auto o = oracle[j + 4];
    CHECK(std::abs(e[j] - Complex(double(o.real()), double(o.imag()))) < 1e-14);
  }
  // I_0(2) = 2.2795853023360673
  CHECK(e[0].real() == doctest::Approx(2.2795853023360673).epsilon(1e-14));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Loop g = random_loop(rng, 3, -3, 3);
    const Loop eg = loop_exp(g, 8);
    const auto og = dft_exp_coeffs(g, 8, 256);
    double worst = 0;
    for (int j = -8; j <= 8; ++j) {
      const auto o = og[j + 8];
      worst = std::max(worst, std::abs(eg[j] - Complex(double(o.real()), double(o.imag()))));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("conj_reflect and real_part") {
  CHECK(conj_reflect(Loop::monomial(-1, 1.0))[1] == Complex(1));
  CHECK(conj_reflect(Loop::constant(Complex(0, 1)))[0] == Complex(0, -1));

  const Complex z(2.0, 3.0);
  const Loop r = real_part(Loop::monomial(-1, z));
  CHECK(r[-1] == 0.5 * z);
  CHECK(r[1] == 0.5 * std::conj(z));
  CHECK(std::abs(loop_eval(real_part(Loop::monomial(-1, z)), Complex(-1)) - Complex(-z.real())) < 1e-15);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const Loop f = random_loop(rng, 4, -4, 4);
    CHECK(max_coeff_distance(conj_reflect(conj_reflect(f)), f) == 0.0);
    CHECK(max_coeff_distance(real_part(real_part(f)), real_part(f)) < 1e-16);
    CHECK(max_coeff_distance(conj_reflect(real_part(f)), real_part(f)) == 0.0);
    for (int s = 0; s < 64; ++s) {
      const Complex lam = std::polar(1.0, 2.0 * M_PI * s / 64.0);
      const Complex fv = loop_eval(f, lam);
      const Complex rv = loop_eval(real_part(f), lam);
      CHECK(std::abs(rv - 0.5 * (fv + std::conj(fv))) < 1e-13);
      if (s % 2 == 0) CHECK(std::abs(rv.imag()) < 1e-12);
    }
  }
}

TEST_CASE("project_band partitions support") {
  Loop f(1);
  f(-1) = 1.0;
  f(0) = 1.0;
  f(1) = 1.0;
  const Loop p = project_band(f, 0, 100);
  CHECK(p[-1] == Complex(0));
  CHECK(p[0] == Complex(1));
  CHECK(p[1] == Complex(1));
  CHECK_THROWS_AS(project_band(f, 1, 0), Error);

  std::mt19937_64 rng(9);
  const Loop g = random_loop(rng, 5, -5, 5);
  CHECK(max_coeff_distance(project_band(g, -5, 5), g) == 0.0);
  CHECK(max_coeff_distance(project_band(g, -5, 1) + project_band(g, 2, 5), g) == 0.0);
}

TEST_CASE("loop_eval") {
  Loop f(1);
  f(-1) = 1.0;
  f(1) = 1.0;
  CHECK(loop_eval(f, Complex(1)) == Complex(2));
  CHECK(loop_eval(f, Complex(-1)) == Complex(-2));
  CHECK_THROWS_AS(loop_eval(f, Complex(0)), Error);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const Loop g = random_loop(rng, 8, -8, 8);
    const auto o = naive_eval(g, Complex(0, 1));
    CHECK(std::abs(loop_eval(g, Complex(0, 1)) - Complex(double(o.real()), double(o.imag()))) < 1e-13);
  }
}
