#include "loopharm/loopfactor.hpp"

#include <algorithm>

namespace loopharm {

namespace {

void require_band(const SolvLoopElement& g, int band) {
  for (int k = 0; k < 3; ++k) {
    const Loop& f = g.entry(k);
    if (f.is_zero()) continue;
    if (f.support_lo() < -band || f.support_hi() > band)
      throw Error(ErrorKind::BandOverflow, "input loop has content outside the pipeline band " +
                                               std::to_string(band));
  }
}

double element_scale(const SolvLoopElement& a) {
  double s = 1;
  for (int k = 0; k < 3; ++k) s = std::max(s, a.entry(k).mass());
  return s;
}

double element_edge(const SolvLoopElement& a, int width) {
  double e = 0;
  for (int k = 0; k < 3; ++k) e = std::max(e, detail::edge_mass(a.entry(k), width));
  return e;
}

// Runs split(W) on doubling working bands until both factors have negligible
// edge coefficients.
template <typename Factors, typename Split>
Factors adaptive_split(const SolvLoopElement& g, const SplitOptions& opt, Split split) {
  require_band(g, opt.band);
  const int n = std::max({opt.band, g.band(), 1});
  const int width = std::max(1, n / 2);
  for (int w = 2 * n;; w = std::min(2 * w, opt.max_band)) {
    DiscardTally<double> tally;
    auto [a, b] = split(g.widened(w), w, &tally);
    const double edge = std::max(element_edge(a, width), element_edge(b, width));
    const double scale = std::max(element_scale(a), element_scale(b));
    if (edge <= opt.tail_tol * scale) {
      Factors out{std::move(a), std::move(b), {}};
      out.report.band = w;
      out.report.discarded_mass = tally.mass;
      out.report.edge_mass = edge;
      return out;
    }
    if (w >= opt.max_band)
      throw Error(ErrorKind::BandOverflow, "factor tails did not decay within band " + std::to_string(w) +
                                               " (edge mass " + std::to_string(edge) + ")");
  }
}

}  // namespace

Loop reflect_negative(const Loop& f) {
  const int n = f.band();
  if (n == 0) return Loop(0);
  const Loop neg = project_band(f, -n, -1);
  return neg + conj_reflect(neg);
}

BirkhoffFactors birkhoff_split(const SolvLoopElement& g, const SplitOptions& opt) {
  const int n = std::max(g.band(), 1);
  auto split = [n](const SolvLoopElement& gw, int w, DiscardTally<double>* tally) {
    const SolvParams& p = gw.params;
    SolvLoopElement minus = SolvLoopElement::identity(p, w), plus = SolvLoopElement::identity(p, w);
    const Loop x3m = project_band(gw.x3, -w, -1);
    minus.x3 = x3m;
    plus.x3 = project_band(gw.x3, 0, w);
    for (int k = 0; k < 2; ++k) {
      const double mu = p.mu(k + 1);
      const Loop& x = gw.entry(k);
      if (mu == 0.0 || x3m.is_zero()) {
        minus.entry(k) = project_band(x, -w, -1);
        plus.entry(k) = project_band(x, 0, w);
        continue;
      }
      // h = exp(-mu x3_-) x; exact on [-w, w] since the exponential is one-sided
      const Loop h = loop_mul(loop_exp(-mu * x3m, w + n), x, w);
      plus.entry(k) = project_band(h, 0, w);
      minus.entry(k) = loop_mul(project_band(h, -w, -1), loop_exp(mu * x3m, w), w, tally);
    }
    return std::pair{std::move(minus), std::move(plus)};
  };
  BirkhoffFactors out = adaptive_split<BirkhoffFactors>(g, opt, split);
  if (opt.compute_residual)
    out.report.reconstruction_error =
        max_coeff_distance(solv_mul(out.minus, out.plus), g.widened(out.report.band));
  return out;
}

IwasawaFactors iwasawa_split(const SolvLoopElement& g, const SplitOptions& opt) {
  const int n = std::max(g.band(), 1);
  auto split = [n](const SolvLoopElement& gw, int w, DiscardTally<double>* tally) {
    const SolvParams& p = gw.params;
    SolvLoopElement real = SolvLoopElement::identity(p, w), plus = SolvLoopElement::identity(p, w);
    const Loop xt3 = reflect_negative(gw.x3);
    real.x3 = xt3;
    plus.x3 = project_band(gw.x3, 0, w) - project_band(conj_reflect(gw.x3), 1, w);
    for (int k = 0; k < 2; ++k) {
      const double mu = p.mu(k + 1);
      const Loop& x = gw.entry(k);
      const bool twisted = mu != 0.0 && !xt3.is_zero();
      const Loop h = twisted ? loop_mul(loop_exp(-mu * xt3, w + n), x, w) : x;
      plus.entry(k) = project_band(h, 0, w) - project_band(conj_reflect(h), 1, w);
      const Loop r = reflect_negative(h);
      real.entry(k) = twisted ? loop_mul(r, loop_exp(mu * xt3, 2 * w), w, tally) : r;
    }
    return std::pair{std::move(real), std::move(plus)};
  };
  IwasawaFactors out = adaptive_split<IwasawaFactors>(g, opt, split);
  if (opt.compute_residual)
    out.report.reconstruction_error =
        max_coeff_distance(solv_mul(out.real, out.plus), g.widened(out.report.band));
  return out;
}

RealityCheck check_reality(const SolvLoopElement& g, double tol) {
  double r = 0;
  for (int k = 0; k < 3; ++k) r = std::max(r, max_coeff_distance(g.entry(k), conj_reflect(g.entry(k))));
  return {r <= tol, r};
}

}  // namespace loopharm
