#pragma once

// Generalized Weierstrass (DPW) construction of harmonic maps into G(mu1, mu2):
//   potential -> holomorphic frame C (Step 1) -> Iwasawa split C = F W+ (Step 2)
//   -> extended solution F^(lambda) = F(lambda) F(1)^{-1} (Step 3),
// with phi = F^(-1) and the associated family F^(-lambda) F^(lambda)^{-1}.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "loopharm/liegroup.hpp"
#include "loopharm/loopfactor.hpp"
#include "loopharm/mapgrid.hpp"
#include "loopharm/polynomial.hpp"

namespace loopharm {

/// Normalized potential lambda^{-1} xi dz with polynomial entries.
struct PotentialSpec {
  HoloPoly xi1, xi2, xi3;
  SolvParams params{};
  Complex base_point{0};
  int band = 12;

  const HoloPoly& xi(int k) const { return k == 1 ? xi1 : (k == 2 ? xi2 : xi3); }
  /// Throws InvalidArgument for band < 2 or oversized polynomials.
  void validate() const;
};

/// Xi(z) = int_{z_*}^z xi3(t) dt.
Complex integrate_Xi(const HoloPoly& xi3, Complex base_point, Complex z);

/// Closed-form Step-1 frames for one potential. The lambda^{-(m+1)} coefficient
/// of x^k is the exact polynomial integral of xi^k (mu_k Xi)^m / m!.
class Step1Table {
 public:
  explicit Step1Table(const PotentialSpec& pot, double tail_tol = 1e-12);

  /// C(z, .) at the potential's band; BandOverflow if the lambda^{-N}
  /// coefficient is above tail_tol.
  SolvLoopElement frame(Complex z) const;
  const PotentialSpec& potential() const noexcept { return pot_; }

 private:
  PotentialSpec pot_;
  double tail_tol_;
  HoloPoly xi_big_;                               // Xi in s = t - z_*
  std::array<std::vector<HoloPoly>, 2> columns_;  // coefficient polynomials in s
};

SolvLoopElement solve_step1(const PotentialSpec& pot, Complex z);

/// RK4 for dC = C (lambda^{-1} xi) along the segment z_* -> z at frozen lambda.
Eigen::Matrix3cd ode_oracle(const PotentialSpec& pot, Complex z, Complex lambda, int n_steps);

/// C = F W+ with F real on the unit circle.
IwasawaFactors step2_iwasawa(const SolvLoopElement& c, const SplitOptions& opt = {});

/// F^(lambda) = F(lambda) F(1)^{-1}.
SolvLoopElement step3_extended(const SolvLoopElement& f);

/// F^(-lambda) F^(lambda)^{-1}, real part; lambda = 1 gives the harmonic map.
SolvPoint associated_map(const SolvLoopElement& extended, Complex lambda);

/// The 8th roots of unity (these include +1 and -1).
std::vector<Complex> default_lambdas();

struct SynthOptions {
  SplitOptions split{};
  std::vector<Complex> lambdas = default_lambdas();
  unsigned threads = 0;
  bool keep_frames = false;
};

struct SynthResult {
  MapGrid grid;                        ///< phi = F^(-1) plus lambda slices
  std::vector<SolvLoopElement> frames;  ///< extended frames, if requested
  double discarded_mass = 0;
  int max_band = 0;
  double max_normalization_error = 0;  ///< max |F^(1) - e| over valid points
  std::vector<std::string> failures;   ///< first few per-point diagnostics
};

SynthResult synthesize(const PotentialSpec& pot, const GridSpec& grid, const SynthOptions& opt = {});

struct ClosedFormOptions {
  int max_samples = 2048;
  double tol = 1e-14;  ///< spectral tail relative to the sample peak
};

/// Direct evaluation of the representation formula via scalar loops.
SolvPoint closed_form_map(const PotentialSpec& pot, Complex z, const ClosedFormOptions& opt = {});
/// The same formula continued to independent (z, w), w in place of conj(z).
SolvPointC closed_form_map_c(const PotentialSpec& pot, Complex z, Complex w, const ClosedFormOptions& opt = {});

/// phi(z, 0) and d/dz phi(z, 0) on the slice conj(z) = 0.
struct SliceValue {
  Eigen::Vector3cd phi;
  Eigen::Vector3cd phi_z;
};
using SliceAccessor = std::function<SliceValue(Complex)>;

/// Slice of the analytically continued closed-form map.
SliceAccessor closed_form_slice(const PotentialSpec& pot);
/// Slice read off a sampled grid by finite differences at grid nodes. Only
/// valid when phi_z is holomorphic, e.g. for xi3 = 0 or mu = (0, 0).
SliceAccessor grid_slice(const MapGrid& grid);

/// Recovers (xi1, xi2, xi3)(z) from a map. The Cauchy-transform term uses
/// midpoint quadrature over the grid, skipping nodes with |xi - z| < h.
std::array<Complex, 3> extract_normalized_potential(const SliceAccessor& slice, const MapGrid& grid,
                                                    const SolvParams& params, Complex z);

/// exp(lambda^{-1} int Phi + lambda conj(int Phi)) in the algebra's matrix
/// representation; NonCommuting unless Phi commutes with itself and its
/// conjugate along the path.
Eigen::MatrixXcd torsion_free_map(const std::vector<HoloPoly>& phi, const LieAlgebraData& alg, Complex base_point,
                                  Complex z, Complex lambda, double tol = 1e-10);

}  // namespace loopharm
