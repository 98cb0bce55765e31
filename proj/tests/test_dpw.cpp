#include <doctest.h>

#include <random>

#include "loopharm/dpw.hpp"

using namespace loopharm;

namespace {

const Complex I1(0, 1);

PotentialSpec plane_potential(const SolvParams& p) {
  PotentialSpec pot;
  pot.xi1 = HoloPoly{Complex(-0.25)};
  pot.xi2 = HoloPoly{Complex(0, 0.25)};
  pot.xi3 = HoloPoly{};
  pot.params = p;
  return pot;
}

HoloPoly random_poly(std::mt19937_64& rng, int degree, double radius) {
  std::uniform_real_distribution<double> u(-1, 1);
  HoloPoly::Coeffs c(degree + 1);
  for (int m = 0; m <= degree; ++m) c[m] = radius * Complex(u(rng), u(rng)) / std::sqrt(2.0);
  return HoloPoly(c);
}

PotentialSpec random_potential(std::mt19937_64& rng, const SolvParams& p, int degree, double radius, int band = 32) {
  PotentialSpec pot;
  pot.xi1 = random_poly(rng, degree, radius);
  pot.xi2 = random_poly(rng, degree, radius);
  pot.xi3 = random_poly(rng, degree, radius);
  pot.params = p;
  pot.band = band;
  return pot;
}

// The potential integrated by hand: int_{z_*}^z xi.
Complex primitive(const HoloPoly& xi, Complex zs, Complex z) {
  const HoloPoly a = xi.antiderivative();
  return a(z) - a(zs);
}

double frame_vs_ode(const PotentialSpec& pot, Complex z, Complex lambda, int steps) {
  const SolvLoopElement c = solve_step1(pot, z);
  const Eigen::Matrix3cd m = solv_matrix(c.eval(lambda), pot.params);
  return (m - ode_oracle(pot, z, lambda, steps)).cwiseAbs().maxCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// Oracles written against the construction before the implementation.

TEST_CASE("step 1 of a translation-only potential is linear in lambda^-1") {
  const PotentialSpec pot = plane_potential({1, -1});
  const Complex z(0.3, -0.7);
  const SolvLoopElement c = solve_step1(pot, z);
  CHECK(std::abs(c.x1[-1] - (-0.25 * z)) < 1e-15);
  CHECK(std::abs(c.x2[-1] - (0.25 * I1 * z)) < 1e-15);
  for (int j = -c.band(); j <= c.band(); ++j) {
    if (j == -1) continue;
    CHECK(std::abs(c.x1[j]) == 0.0);
    CHECK(std::abs(c.x2[j]) == 0.0);
  }
  CHECK(c.x3.max_abs() == 0.0);
}

TEST_CASE("step 1 coefficients follow the exponential series in Xi") {
  // xi = (1, 0, c), mu = (1, 0): x1 = sum_m c^m z^{m+1} / (m+1)! lambda^{-(m+1)}
  PotentialSpec pot;
  const Complex cst(0.4, 0.3);
  pot.xi1 = HoloPoly{Complex(1)};
  pot.xi2 = HoloPoly{};
  pot.xi3 = HoloPoly{cst};
  pot.params = {1, 0};
  pot.band = 20;
  const Complex z(0.6, 0.2);
  const SolvLoopElement c = solve_step1(pot, z);
  double fact = 1;
  for (int m = 0; m < 10; ++m) {
    fact *= (m + 1);
    const Complex expect = std::pow(cst, m) * std::pow(z, m + 1) / fact;
    CHECK(std::abs(c.x1[-(m + 1)] - expect) < 1e-15);
  }
  CHECK(std::abs(c.x3[-1] - cst * z) < 1e-15);
  CHECK(std::abs(c.x2[-1]) == 0.0);
}

TEST_CASE("step 1 agrees with an RK4 integration of the frame equation") {
  std::mt19937_64 rng(11);
  for (const SolvParams p : {SolvParams{1, 1}, SolvParams{1, -1}, SolvParams{0.5, 2}}) {
    const PotentialSpec pot = random_potential(rng, p, 2, 1.0);
    for (const Complex z : {Complex(0.5, 0.2), Complex(-0.4, 0.6)})
      for (int s = 0; s < 4; ++s) {
        const Complex lam = std::polar(1.0, 0.3 + s * M_PI / 2);
        CHECK(frame_vs_ode(pot, z, lam, 512) < 1e-9);
      }
  }
}

TEST_CASE("the RK4 oracle converges at fourth order") {
  std::mt19937_64 rng(5);
  const PotentialSpec pot = random_potential(rng, {1, -1}, 2, 1.0);
  const Complex z(0.8, -0.5), lam = std::polar(1.0, 1.1);
  const double e1 = frame_vs_ode(pot, z, lam, 16), e2 = frame_vs_ode(pot, z, lam, 32);
  const double order = std::log2(e1 / e2);
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("ode oracle argument checks") {
  const PotentialSpec pot = plane_potential({1, 1});
  CHECK_THROWS_AS(ode_oracle(pot, Complex(1), Complex(0), 64), Error);
  CHECK_THROWS_AS(ode_oracle(pot, Complex(1), Complex(1), 8), Error);
  try {
    ode_oracle(pot, Complex(1), Complex(0), 64);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroArgument);
  }
}

TEST_CASE("Xi integrates xi3 from the base point") {
  const HoloPoly xi3{Complex(1), Complex(0, 2)};
  const Complex zs(0.5, 0.5), z(-1, 2);
  CHECK(std::abs(integrate_Xi(xi3, zs, z) - ((z - zs) + I1 * (z * z - zs * zs))) < 1e-14);
}

TEST_CASE("the plane potential gives the identity map of the plane") {
  for (const SolvParams p : {SolvParams{1, 1}, SolvParams{1, -1}, SolvParams{0, 0}}) {
    const PotentialSpec pot = plane_potential(p);
    for (const Complex z : {Complex(0.3, -0.2), Complex(-1.5, 0.75)}) {
      const IwasawaFactors f = step2_iwasawa(solve_step1(pot, z));
      const SolvLoopElement fh = step3_extended(f.real);
      const SolvPoint phi = associated_map(fh, Complex(1));
      CHECK(std::abs(phi.x1 - z.real()) < 1e-14);
      CHECK(std::abs(phi.x2 - z.imag()) < 1e-14);
      CHECK(std::abs(phi.x3) < 1e-14);
      // the extended frame is lambda^{-1} P + lambda conj(P) minus its value at 1
      const Complex p1 = -0.25 * z;
      CHECK(std::abs(fh.x1[-1] - p1) < 1e-14);
      CHECK(std::abs(fh.x1[1] - std::conj(p1)) < 1e-14);
      CHECK(std::abs(fh.x1[0] + 2 * p1.real()) < 1e-14);
    }
  }
}

TEST_CASE("abelian potentials give -4 Re of the primitive") {
  std::mt19937_64 rng(3);
  const PotentialSpec pot = random_potential(rng, {0, 0}, 3, 1.0, 12);
  for (const Complex z : {Complex(0.2, 0.9), Complex(-0.7, -0.1)}) {
    const SolvPoint phi = associated_map(step3_extended(step2_iwasawa(solve_step1(pot, z)).real), Complex(1));
    CHECK(std::abs(phi.x1 + 4 * primitive(pot.xi1, pot.base_point, z).real()) < 1e-13);
    CHECK(std::abs(phi.x2 + 4 * primitive(pot.xi2, pot.base_point, z).real()) < 1e-13);
    CHECK(std::abs(phi.x3 + 4 * primitive(pot.xi3, pot.base_point, z).real()) < 1e-13);
  }
}

TEST_CASE("the third coordinate is -4 Re Xi for every mu") {
  std::mt19937_64 rng(8);
  const PotentialSpec pot = random_potential(rng, {1, -1}, 2, 1.0);
  for (const Complex z : {Complex(0.2, 0.5), Complex(-0.6, -0.3)}) {
    const SolvPoint phi = associated_map(step3_extended(step2_iwasawa(solve_step1(pot, z)).real), Complex(1));
    CHECK(std::abs(phi.x3 + 4 * integrate_Xi(pot.xi3, pot.base_point, z).real()) < 1e-12);
  }
}

TEST_CASE("step 2 and step 3 invariants on random potentials") {
  std::mt19937_64 rng(21);
  for (const SolvParams p : {SolvParams{1, 1}, SolvParams{1, -1}, SolvParams{0, 1}}) {
    const PotentialSpec pot = random_potential(rng, p, 2, 1.0);
    const SolvLoopElement c = solve_step1(pot, Complex(0.4, -0.3));
    const IwasawaFactors f = step2_iwasawa(c);
    CHECK(f.report.reconstruction_error < 1e-10);
    CHECK(check_reality(f.real).real);
    for (int k = 0; k < 3; ++k)
      for (int j = -f.plus.band(); j < 0; ++j) CHECK(std::abs(f.plus.entry(k)[j]) == 0.0);
    const SolvLoopElement fh = step3_extended(f.real);
    const SolvPointC one = fh.eval(Complex(1));
    CHECK(std::max({std::abs(one.x1), std::abs(one.x2), std::abs(one.x3)}) < 1e-12);
    CHECK(check_reality(fh).real);
  }
}

TEST_CASE("closed form agrees with the loop construction") {
  std::mt19937_64 rng(17);
  for (const SolvParams p : {SolvParams{1, 1}, SolvParams{1, -1}, SolvParams{0, 1}, SolvParams{0, 0}}) {
    const PotentialSpec pot = random_potential(rng, p, 3, 1.0);
    for (const Complex z : {Complex(0.5, 0.1), Complex(-0.3, 0.7), Complex(0.9, -0.8)}) {
      const SolvPoint a = associated_map(step3_extended(step2_iwasawa(solve_step1(pot, z)).real), Complex(1));
      const SolvPoint b = closed_form_map(pot, z);
      CHECK(std::abs(a.x1 - b.x1) < 1e-8);
      CHECK(std::abs(a.x2 - b.x2) < 1e-8);
      CHECK(std::abs(a.x3 - b.x3) < 1e-8);
    }
  }
}

TEST_CASE("closed form of the plane potential and its continuation") {
  const PotentialSpec pot = plane_potential({1, 1});
  const Complex z(0.7, -0.4), w(-0.2, 0.3);
  const SolvPoint phi = closed_form_map(pot, z);
  CHECK(std::abs(phi.x1 - z.real()) < 1e-14);
  CHECK(std::abs(phi.x2 - z.imag()) < 1e-14);
  // continued map: x = (z + w) / 2, y = (z - w) / (2i)
  const SolvPointC c = closed_form_map_c(pot, z, w);
  CHECK(std::abs(c.x1 - 0.5 * (z + w)) < 1e-14);
  CHECK(std::abs(c.x2 - (z - w) / (2.0 * I1)) < 1e-14);
}

TEST_CASE("synthesize fills the grid and the lambda slices") {
  const PotentialSpec pot = plane_potential({1, -1});
  SynthOptions opt;
  opt.keep_frames = true;
  const SynthResult r = synthesize(pot, square_grid(1.0, 0.25), opt);
  CHECK(r.grid.masked_count() == 0);
  CHECK(r.frames.size() == 81);
  CHECK(r.grid.slices().size() == 8);
  for (int j = 0; j < r.grid.ny(); ++j)
    for (int i = 0; i < r.grid.nx(); ++i) {
      const Complex z = r.grid.z(i, j);
      CHECK(std::abs(r.grid.point(i, j)[0] - z.real()) < 1e-14);
      CHECK(std::abs(r.grid.point(i, j)[1] - z.imag()) < 1e-14);
    }
  // slice at lambda = 1 reproduces phi; slice at lambda = -1 is its inverse
  const auto& sl = r.grid.slices();
  CHECK((sl[0].points - r.grid.points()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((sl[4].points + r.grid.points()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(r.max_normalization_error < 1e-14);
}

TEST_CASE("synthesize masks points whose frame exceeds the band") {
  PotentialSpec pot;
  pot.xi1 = HoloPoly{Complex(1)};
  pot.xi2 = HoloPoly{Complex(1)};
  pot.xi3 = HoloPoly{Complex(8)};
  pot.params = {1, 1};
  pot.band = 12;
  SynthOptions opt;
  opt.lambdas = {};
  const SynthResult r = synthesize(pot, square_grid(1.0, 0.5), opt);
  CHECK(r.grid.masked_count() > 0);
  CHECK(r.grid.mask()[r.grid.index(2, 2)] == 1);
  CHECK(!r.failures.empty());
  CHECK_THROWS_AS(solve_step1(pot, Complex(1, 1)), Error);
}

TEST_CASE("synthesize is deterministic across thread counts") {
  std::mt19937_64 rng(2);
  const PotentialSpec pot = random_potential(rng, {1, -1}, 2, 1.0);
  SynthOptions a, b;
  a.threads = 1;
  b.threads = 3;
  a.lambdas = b.lambdas = {Complex(1), Complex(0, 1)};
  const GridSpec g = square_grid(0.5, 0.25);
  const SynthResult ra = synthesize(pot, g, a), rb = synthesize(pot, g, b);
  CHECK((ra.grid.points() - rb.grid.points()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ra.discarded_mass == rb.discarded_mass);
}

TEST_CASE("synthesize rejects off-circle slices") {
  SynthOptions opt;
  opt.lambdas = {Complex(2)};
  CHECK_THROWS_AS(synthesize(plane_potential({1, 1}), square_grid(1, 0.5), opt), Error);
}

TEST_CASE("extraction recovers the plane potential from a sampled grid") {
  const PotentialSpec pot = plane_potential({1, 1});
  const SynthResult r = synthesize(pot, square_grid(1.0, 0.125), {});
  const auto xi = extract_normalized_potential(grid_slice(r.grid), r.grid, pot.params, Complex(0.25, -0.5));
  CHECK(std::abs(xi[0] - Complex(-0.25)) < 1e-12);
  CHECK(std::abs(xi[1] - Complex(0, 0.25)) < 1e-12);
  CHECK(std::abs(xi[2]) < 1e-12);
}

TEST_CASE("extraction recovers abelian potentials through the continued slice") {
  std::mt19937_64 rng(9);
  const PotentialSpec pot = random_potential(rng, {0, 0}, 3, 1.0, 12);
  const MapGrid grid(square_grid(1.0, 0.25), 3);
  for (const Complex z : {Complex(0.25, 0.5), Complex(-0.5, 0)}) {
    const auto xi = extract_normalized_potential(closed_form_slice(pot), grid, pot.params, z);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(xi[k] - pot.xi(k + 1)(z)) < 1e-9);
  }
}

TEST_CASE("extraction refuses points too close to the edge when the integral is active") {
  std::mt19937_64 rng(4);
  const PotentialSpec pot = random_potential(rng, {1, 1}, 1, 0.5, 32);
  const SynthResult r = synthesize(pot, square_grid(0.5, 0.125), {});
  try {
    extract_normalized_potential(closed_form_slice(pot), r.grid, pot.params, Complex(0.45, 0));
    FAIL("expected SingularityTooClose");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularityTooClose);
  }
}

TEST_CASE("grid slice requires grid nodes") {
  const MapGrid grid(square_grid(1.0, 0.25), 3);
  CHECK_THROWS_AS(grid_slice(grid)(Complex(0.1, 0.1)), Error);
  CHECK_THROWS_AS(grid_slice(grid)(Complex(1.0, 0)), Error);
}

TEST_CASE("torsion-free maps from commuting potentials") {
  const LieAlgebraData nil = nil_algebra(1);
  const GroupDescriptor g = nil_group(1);
  const std::vector<HoloPoly> vertical{HoloPoly{Complex(0.5)}, HoloPoly{}, HoloPoly{Complex(0, -0.5)}};
  for (const Complex z : {Complex(0.3, 0.8), Complex(-1.2, 0.4)}) {
    const Eigen::MatrixXcd m = torsion_free_map(vertical, nil, Complex(0), z, Complex(1));
    const Eigen::VectorXd x = g.coords_from_matrix(m);
    CHECK(std::abs(x[0] - z.real()) < 1e-14);
    CHECK(std::abs(x[1]) < 1e-14);
    CHECK(std::abs(x[2] - z.imag()) < 1e-14);
  }
  const std::vector<HoloPoly> zero(3);
  CHECK((torsion_free_map(zero, nil, Complex(0), Complex(1, 1), Complex(0, 1)) -
         Eigen::MatrixXcd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("torsion-free map rejects non-commuting potentials") {
  const std::vector<HoloPoly> phi{HoloPoly{Complex(1)}, HoloPoly{Complex(0, 1)}, HoloPoly{}};
  try {
    torsion_free_map(phi, nil_algebra(1), Complex(0), Complex(0.5), Complex(1));
    FAIL("expected NonCommuting");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonCommuting);
  }
  CHECK_THROWS_AS(torsion_free_map({HoloPoly{}}, nil_algebra(1), Complex(0), Complex(0.5), Complex(1)), Error);
}
