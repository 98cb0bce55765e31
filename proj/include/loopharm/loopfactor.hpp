#pragma once

// Global Birkhoff and Iwasawa decompositions of loops in G(mu1, mu2)^C.
//
// Both splittings act on Laurent coefficients. The third coordinate is split
// linearly; the first two are untwisted by exp(-mu_k x3_-) (or its real
// counterpart), split by Fourier index and re-twisted. The twisted factors
// have infinite tails in general, so they are computed on a working band that
// doubles until their edge coefficients are negligible.

#include "loopharm/liegroup.hpp"

namespace loopharm {

struct SplitOptions {
  /// Pipeline band; inputs with content outside it are rejected.
  int band = 12;
  /// Largest working band before giving up with BandOverflow.
  int max_band = 1024;
  /// Edge coefficients of the factors must fall below tail_tol * scale.
  double tail_tol = 1e-16;
  bool compute_residual = true;
};

struct SplitReport {
  int band = 0;                     ///< working band of the returned factors
  double discarded_mass = 0;        ///< mass dropped by truncated products
  double edge_mass = 0;             ///< largest edge mass seen on the final band
  double reconstruction_error = 0;  ///< max coefficient error of the product, if computed
};

/// g = g_minus * g_plus with g_minus(infinity) = e.
struct BirkhoffFactors {
  SolvLoopElement minus, plus;
  SplitReport report;
};

/// g = g_real * g_plus with g_real(lambda) in G(mu1, mu2) on the unit circle.
struct IwasawaFactors {
  SolvLoopElement real, plus;
  SplitReport report;
};

BirkhoffFactors birkhoff_split(const SolvLoopElement& g, const SplitOptions& opt = {});
IwasawaFactors iwasawa_split(const SolvLoopElement& g, const SplitOptions& opt = {});

struct RealityCheck {
  bool real = false;
  double residual = 0;  ///< max_j |c_j - conj(c_{-j})| over all entries
};

RealityCheck check_reality(const SolvLoopElement& g, double tol = 1e-10);

/// sum_{j<0} (f_j lambda^j + conj(f_j) lambda^{-j})
Loop reflect_negative(const Loop& f);

}  // namespace loopharm
