// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "loopharm/dpw.hpp"
#include "loopharm/gallery.hpp"
#include "loopharm/loopfactor.hpp"
#include "loopharm/verify.hpp"

using namespace loopharm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Complex unit_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Complex c;
  do c = Complex(u(rng), u(rng));
  while (std::abs(c) > 1);
  return c;
}

HoloPoly random_poly(std::mt19937_64& rng, int max_degree) {
  std::uniform_int_distribution<int> deg(0, max_degree);
  const int d = deg(rng);
  HoloPoly::Coeffs c(d + 1);
  for (int m = 0; m <= d; ++m) c[m] = unit_disk(rng);
  return HoloPoly(c);
}

PotentialSpec random_potential(std::mt19937_64& rng, const SolvParams& p, int max_degree) {
  PotentialSpec pot;
  pot.xi1 = random_poly(rng, max_degree);
  pot.xi2 = random_poly(rng, max_degree);
  pot.xi3 = random_poly(rng, max_degree);
  pot.params = p;
  pot.band = 32;
  return pot;
}

const SolvParams kMus[] = {{1, 1}, {1, -1}, {0, 1}, {0, 0}};

// Fixed test potential for the convergence studies.
PotentialSpec study_potential() {
  PotentialSpec pot;
  pot.xi1 = HoloPoly{Complex(0.3, 0.1), Complex(-0.2, 0.2), Complex(0.1, 0)};
  pot.xi2 = HoloPoly{Complex(-0.1, 0.4), Complex(0, 0.15)};
  pot.xi3 = HoloPoly{Complex(0.2, -0.3), Complex(0.1)};
  pot.params = {1, -1};
  pot.band = 32;
  return pot;
}

// Convergence studies compare residuals over one window shared by all grids.
constexpr double kWindow = 1.0 / 8;

double windowed(const std::string& name, const ResidualField& f) {
  return summarize(name, restricted(f, kWindow)).max_norm;
}

double form_scale(const FormGrid& f) {
  double s = 0;
  for (Eigen::Index c = 0; c < f.A.cols(); ++c)
    if (f.valid[c]) s = std::max(s, f.A.col(c).norm());
  return std::max(1.0, s * s);
}

Outcome plane_reconstruction() {
  double worst = 0;
  for (const SolvParams p : {SolvParams{1, 1}, SolvParams{1, -1}, SolvParams{0.5, 2}}) {
    PotentialSpec pot;
    pot.xi1 = HoloPoly{Complex(-0.25)};
    pot.xi2 = HoloPoly{Complex(0, 0.25)};
    pot.params = p;
    SynthOptions opt;
    opt.lambdas = {};
    const SynthResult r = synthesize(pot, GridSpec{}, opt);
    if (r.grid.masked_count() > 0) return {false, "masked points"};
    for (int j = 0; j < r.grid.ny(); ++j)
      for (int i = 0; i < r.grid.nx(); ++i) {
        const Complex z = r.grid.z(i, j);
        worst = std::max(worst, (r.grid.point(i, j) - Eigen::Vector3d(z.real(), z.imag(), 0)).cwiseAbs().maxCoeff());
      }
  }
  return {worst < 1e-9, "max |phi - (x,y,0)| = " + fmt("%.2e", worst)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const PotentialSpec pot = random_potential(rng, kMus[t % 4], 2);
    for (int s = 0; s < 3; ++s) {
      const Complex z(u(rng), u(rng));
      const SolvLoopElement c = solve_step1(pot, z);
      for (const Complex lam : {Complex(1), Complex(-1), Complex(0, 1), Complex(0, -1)}) {
        const Eigen::Matrix3cd a = solv_matrix(c.eval(lam), pot.params);
        const Eigen::Matrix3cd b = ode_oracle(pot, z, lam, 512);
        worst = std::max(worst, (a - b).norm() / b.norm());
      }
    }
  }
  return {worst < 1e-8, "max relative error = " + fmt("%.2e", worst)};
}

Outcome factorization() {
  std::mt19937_64 rng(2002);
  double berr = 0, ierr = 0;
  int max_band = 0;
  bool membership = true, reality = true;
  for (int t = 0; t < 200; ++t) {
    const SolvParams p = kMus[t % 4];
    SolvLoopElement g = SolvLoopElement::identity(p, 6);
    for (int k = 0; k < 3; ++k)
      for (int j = -6; j <= 6; ++j) g.entry(k)(j) = unit_disk(rng);
    SplitOptions opt;
    opt.band = 12;
    const BirkhoffFactors b = birkhoff_split(g, opt);
    const IwasawaFactors w = iwasawa_split(g, opt);
    berr = std::max(berr, b.report.reconstruction_error);
    ierr = std::max(ierr, w.report.reconstruction_error);
    max_band = std::max({max_band, b.report.band, w.report.band});
    for (int k = 0; k < 3; ++k) {
      for (int j = -b.minus.band(); j <= b.minus.band(); ++j)
        if (j >= 0 && b.minus.entry(k)[j] != Complex(0)) membership = false;
      for (int j = -b.plus.band(); j < 0; ++j)
        if (b.plus.entry(k)[j] != Complex(0)) membership = false;
      for (int j = -w.plus.band(); j < 0; ++j)
        if (w.plus.entry(k)[j] != Complex(0)) membership = false;
    }
    if (!check_reality(w.real).real) reality = false;
  }
  const bool pass = berr < 1e-10 && ierr < 1e-10 && membership && reality;
  return {pass, "Birkhoff " + fmt("%.2e", berr) + ", Iwasawa " + fmt("%.2e", ierr) +
                    ", working band up to " + std::to_string(max_band) + (membership ? "" : ", MEMBERSHIP") +
                    (reality ? "" : ", REALITY")};
}

Outcome route_equivalence() {
  std::mt19937_64 rng(3003);
  double worst = 0;
  int masked = 0;
  SynthOptions opt;
  opt.lambdas = {};
  const GridSpec spec{-0.8, 0.8, -0.8, 0.8, 5, 5};
  for (int t = 0; t < 20; ++t) {
    const PotentialSpec pot = random_potential(rng, kMus[t % 4], 3);
    const SynthResult r = synthesize(pot, spec, opt);
    masked += r.grid.masked_count();
    for (int j = 0; j < spec.ny; ++j)
      for (int i = 0; i < spec.nx; ++i) {
        if (!r.grid.valid(i, j)) continue;
        const SolvPoint c = closed_form_map(pot, r.grid.z(i, j));
        worst = std::max(worst, (r.grid.point(i, j) - Eigen::Vector3d(c.x1, c.x2, c.x3)).cwiseAbs().maxCoeff());
      }
  }
  return {worst < 1e-8 && masked == 0,
          "max deviation = " + fmt("%.2e", worst) + ", masked = " + std::to_string(masked)};
}

Outcome pipeline_harmonicity() {
  const PotentialSpec pot = study_potential();
  const GroupDescriptor g = solv_group(pot.params);
  std::vector<double> hs, neutral, flat;
  bool bounded = true, lambda_one = true;
  std::string detail;
  for (const double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const SynthResult r = synthesize(pot, square_grid(0.5, h), {});
    const FormGrid f = numeric_mc_form(r.grid, g);
    const double scale = form_scale(f);
    const double n = windowed("neutral", neutral_harmonicity_field(r.grid, g));
    double fmax = 0;
    for (const Complex& lam : default_lambdas()) {
      const double v = windowed("flat", flatness_field(f, lam, FlatFamily::Neutral));
      if (lam == Complex(1) && v != 0.0) lambda_one = false;
      fmax = std::max(fmax, v);
    }
    if (n >= 10 * h * h * scale || fmax >= 10 * h * h * scale) bounded = false;
    hs.push_back(h);
    neutral.push_back(n);
    flat.push_back(fmax);
    detail += fmt(" h=1/%.0f:", 1 / h) + fmt(" neutral/h^2=%.3f", n / (h * h)) +
              fmt(" flat/h^2=%.3f", fmax / (h * h)) + fmt(" scale=%.3f;", scale);
  }
  const double sn = loglog_slope(hs, neutral), sf = loglog_slope(hs, flat);
  const bool pass = bounded && lambda_one && std::abs(sn - 2) <= 0.2 && std::abs(sf - 2) <= 0.2;
  return {pass, fmt("slopes neutral %.3f", sn) + fmt(", flatness %.3f;", sf) + detail};
}

Outcome headline_contrast() {
  std::vector<double> hs, neutral, metric;
  const GroupDescriptor g = solv_group({1, 1});
  for (const double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const MapGrid m = horosphere(square_grid(0.5, h), true);
    hs.push_back(h);
    neutral.push_back(windowed("neutral", neutral_harmonicity_field(m, g)));
    metric.push_back(windowed("metric", metric_harmonicity_field(m, {1, 1})));
  }
  const double slope = loglog_slope(hs, neutral);
  const double d1 = std::abs(metric[1] - metric[0]) / metric[1], d2 = std::abs(metric[2] - metric[1]) / metric[2];
  const bool pass = std::abs(slope - 2) <= 0.2 && metric[2] > 0.1 && d1 < 0.05 && d2 < 0.05;
  return {pass, fmt("neutral slope %.3f", slope) + fmt(", metric %.4f", metric[0]) + fmt(" -> %.4f", metric[1]) +
                    fmt(" -> %.4f", metric[2])};
}

Outcome torsion_identities() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0;
  const std::vector<LieAlgebraData> algs{solv_algebra({1, -1}), nil_algebra(1), se2_algebra()};
  for (const LieAlgebraData& alg : algs)
    for (int t = 0; t < 100; ++t) {
      const double s = 2 * u(rng);
      const Eigen::Vector3d x(u(rng), u(rng), u(rng)), y(u(rng), u(rng), u(rng));
      const Eigen::VectorXd tor = torsion(alg, family_mu(alg, s), x, y);
      worst = std::max(worst, (tor - s * alg.bracket(x, y)).cwiseAbs().maxCoeff());
    }
  double lc_torsion = 0, lc_compat = 0;
  bool sweep = true;
  for (const double m1 : {-1.0, -0.5, 0.0, 0.5, 1.0})
    for (const double m2 : {-1.0, 0.0, 2.0}) {
      const LieAlgebraData alg = solv_algebra({m1, m2});
      const ConnectionTensor lc = levi_civita(alg, MetricTensor::identity(3));
      lc_torsion = std::max(lc_torsion, torsion_tensor(alg, lc).max_abs());
      lc_compat = std::max(lc_compat, metric_compatibility_defect(lc, MetricTensor::identity(3)));
      const bool symmetric_free = sym_skew_parts(lc).first.mu.max_abs() < 1e-14;
      if (symmetric_free != (m1 == 0 && m2 == 0)) sweep = false;
    }
  const bool pass = worst < 1e-12 && lc_torsion < 1e-12 && lc_compat < 1e-12 && sweep;
  return {pass, fmt("T^t - t[X,Y] %.1e", worst) + fmt(", LC torsion %.1e", lc_torsion) +
                    fmt(", LC metric defect %.1e", lc_compat) + (sweep ? ", bi-invariance sweep ok" : ", SWEEP")};
}

Outcome nil_fixtures() {
  const GridSpec spec = GridSpec{};
  const double hp = neutral_harmonicity_residual(hyperbolic_paraboloid(spec), nil_group(1)).max_norm;
  const LieAlgebraData alg = nil_algebra(1);
  const Eigen::Vector3cd phi(0.5, 0, Complex(0, -0.5));
  const double comm = alg.bracket(phi, Eigen::Vector3cd(phi.conjugate())).cwiseAbs().maxCoeff();
  const std::vector<HoloPoly> pot{HoloPoly{phi[0]}, HoloPoly{phi[1]}, HoloPoly{phi[2]}};
  MapGrid vp(spec, 3);
  for (int j = 0; j < spec.ny; ++j)
    for (int i = 0; i < spec.nx; ++i)
      vp.point(i, j) = nil_group(1).coords_from_matrix(torsion_free_map(pot, alg, Complex(0), vp.z(i, j), Complex(1)));
  const double tf = torsion_free_residual(numeric_mc_form(vp, nil_group(1))).max_norm;
  return {hp < 1e-10 && comm == 0.0 && tf < 1e-10,
          fmt("paraboloid residual %.1e", hp) + fmt(", [Phi, conj Phi] = %.1e", comm) +
              fmt(", vertical plane torsion residual %.1e", tf)};
}

Outcome sol3_primitive_scaling() {
  std::mt19937_64 rng(9009);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const ConnectionTensor lc = sol3_levi_civita();
  double worst_adm = 10, worst_met = 10;
  bool bounded = true;
  for (int t = 0; t < 5; ++t) {
    HoloPoly::Coeffs c(5);
    for (int m = 0; m < 5; ++m) c[m] = unit_disk(rng);
    const HoloPoly w(c);
    const double c3 = u(rng);
    std::vector<double> hs, adm, met;
    for (const double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
      const MapGrid g = sol3_primitive(w, c3, square_grid(0.5, h));
      hs.push_back(h);
      adm.push_back(windowed("adm", admissibility_field(numeric_mc_form(g, solv_group({1, -1})), lc)));
      met.push_back(windowed("metric", metric_harmonicity_field(g, {1, -1})));
    }
    const double sa = loglog_slope(hs, adm), sm = loglog_slope(hs, met);
    if (std::abs(sa - 2) > std::abs(worst_adm - 2)) worst_adm = sa;
    if (std::abs(sm - 2) > std::abs(worst_met - 2)) worst_met = sm;
    if (t == 0) worst_adm = sa, worst_met = sm;
    if (adm.back() <= 0 || met.back() <= 0) bounded = false;
  }
  const bool pass = bounded && std::abs(worst_adm - 2) <= 0.2 && std::abs(worst_met - 2) <= 0.2;
  return {pass, fmt("worst slopes: admissibility %.3f", worst_adm) + fmt(", metric %.3f", worst_met)};
}

Outcome round_trip() {
  PotentialSpec plane;
  plane.xi1 = HoloPoly{Complex(-0.25)};
  plane.xi2 = HoloPoly{Complex(0, 0.25)};
  plane.params = {1, 1};
  SynthOptions opt;
  opt.lambdas = {};
  const SynthResult r = synthesize(plane, GridSpec{}, opt);
  double plane_err = 0;
  for (const Complex z : {Complex(0, 0), Complex(0.25, -0.5), Complex(-0.75, 0.5), Complex(0.5, 0.875)}) {
    const auto xi = extract_normalized_potential(grid_slice(r.grid), r.grid, plane.params, z);
    plane_err = std::max({plane_err, std::abs(xi[0] + 0.25), std::abs(xi[1] - Complex(0, 0.25)), std::abs(xi[2])});
  }
  std::mt19937_64 rng(1010);
  double abel_err = 0;
  const MapGrid grid(GridSpec{}, 3);
  for (int t = 0; t < 5; ++t) {
    const PotentialSpec pot = random_potential(rng, {0, 0}, 3);
    const SliceAccessor slice = closed_form_slice(pot);
    for (const Complex z : {Complex(0.125, 0.25), Complex(-0.5, -0.375), Complex(0.75, 0)}) {
      const auto xi = extract_normalized_potential(slice, grid, pot.params, z);
      for (int k = 0; k < 3; ++k) abel_err = std::max(abel_err, std::abs(xi[k] - pot.xi(k + 1)(z)));
    }
  }
  return {plane_err < 1e-6 && abel_err < 1e-4,
          fmt("plane error %.1e", plane_err) + fmt(", mu = 0 error %.1e", abel_err)};
}

Outcome se2_equivalence() {
  std::mt19937_64 rng(1111);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0, worst_norm = 0, smallest = 1e300;
  for (int t = 0; t < 5; ++t) {
    double a[9];
    for (double& v : a) v = u(rng);
    const GridSpec spec = square_grid(0.5, 1.0 / 32);
    MapGrid g(spec, 3);
    for (int j = 0; j < spec.ny; ++j)
      for (int i = 0; i < spec.nx; ++i) {
        const double x = g.z(i, j).real(), y = g.z(i, j).imag();
        g.point(i, j) << std::sin(a[0] * x + a[1] * y) + a[2] * x * y, std::cos(a[3] * x) * a[4] + y * y * a[5],
            a[6] * x + a[7] * std::sin(y) + a[8] * x * x;
      }
    const SE2CheckReport rep = se2_check_pair(g);
    const double scale = std::max(1.0, rep.direct.max_norm);
    worst = std::max(worst, rep.discrepancy / scale);
    worst_norm = std::max(worst_norm, rep.norm_discrepancy / scale);
    smallest = std::min(smallest, rep.direct.max_norm);
  }
  return {worst < 1e-13 && worst_norm < 1e-13 && smallest > 1e-3,
          fmt("max componentwise discrepancy %.1e", worst) + fmt(", norm discrepancy %.1e", worst_norm) +
              fmt(", smallest residual %.2e", smallest)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"plane reconstruction", plane_reconstruction},
      {"step 1 vs RK4 oracle", oracle_equivalence},
      {"Birkhoff and Iwasawa reconstruction", factorization},
      {"frame route vs closed form", route_equivalence},
      {"pipeline harmonicity and flatness convergence", pipeline_harmonicity},
      {"horosphere: neutral harmonic, not metric harmonic", headline_contrast},
      {"torsion identities and Levi-Civita", torsion_identities},
      {"Nil_3 fixtures", nil_fixtures},
      {"Sol_3 primitive maps", sol3_primitive_scaling},
      {"normalized potential round trip", round_trip},
      {"SE(2) formulations agree", se2_equivalence},
  };
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1fs\n", static_cast<int>(criteria.size()) - failed, criteria.size(),
              total);
  return failed == 0 ? 0 : 1;
}
