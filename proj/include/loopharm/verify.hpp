#pragma once

// Finite-difference residuals of the differential identities satisfied by
// harmonic maps into Lie groups. Every 2-form residual is reported as its
// coefficient of dz ^ dzbar, with [a ^ b](X, Y) = [a(X), b(Y)] - [a(Y), b(X)].
//
// Stencils: 3-point central first derivatives, 5-point Laplacian, and the
// boundary ring (or any point next to a masked sample) excluded.

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "loopharm/liegroup.hpp"
#include "loopharm/mapgrid.hpp"

namespace loopharm {

/// alpha = phi^{-1} d phi = A dz + B dzbar at each grid node, in the algebra basis.
struct FormGrid {
  GridSpec spec;
  LieAlgebraData algebra;
  Eigen::MatrixXcd A, B;            ///< dim x (nx * ny); zero where invalid
  std::vector<std::uint8_t> valid;  ///< node has a centered stencil of valid samples

  double h() const { return spec.hx(); }
  int index(int i, int j) const { return j * spec.nx + i; }
  bool ok(int i, int j) const { return valid[index(i, j)] != 0; }
};

/// Per-node residual vectors, zero and invalid outside the stencil's reach.
struct ResidualField {
  GridSpec spec;
  Eigen::MatrixXcd values;
  std::vector<std::uint8_t> valid;
};

struct ResidualReport {
  std::string name;
  double max_norm = 0;  ///< max over valid nodes of the Euclidean norm
  double l2_norm = 0;   ///< sqrt(h^2 sum |r|^2), Kahan-summed in node order
  double grid_h = 0;
  int points = 0;
  std::vector<std::pair<std::complex<double>, double>> per_lambda;  ///< (lambda, max_norm)
};

ResidualReport summarize(std::string name, const ResidualField& field);

/// Pointwise derivatives of a sampled map; phi_z = (phi_x - i phi_y) / 2.
struct GridDerivatives {
  Eigen::MatrixXcd dz, dzbar;  ///< dim x (nx * ny)
  Eigen::MatrixXd dzdzbar;     ///< Laplacian / 4
  std::vector<std::uint8_t> valid;
};

/// Throws GridTooSmall below 5x5.
GridDerivatives grid_derivatives(const MapGrid& grid);

/// Throws GridTooSmall; uses the group's closed-form left translation.
FormGrid numeric_mc_form(const MapGrid& grid, const GroupDescriptor& group);

/// fd check of B = conj(A) relative to the form's scale.
double form_reality_defect(const FormGrid& form);

enum class FlatFamily { Neutral, TorsionFree };

/// d alpha_lambda + 1/2 [alpha_lambda ^ alpha_lambda] = dB - dbar A + [A, B] for
///   Neutral:     A_l = (1 - 1/l) A / 2, B_l = (1 - l) B / 2
///   TorsionFree: A_l = A / l,           B_l = l B
ResidualField flatness_field(const FormGrid& form, std::complex<double> lambda, FlatFamily family);
ResidualReport flatness_residual(const FormGrid& form, std::complex<double> lambda, FlatFamily family);
/// Max over several lambdas, with the per-lambda breakdown filled in.
ResidualReport flatness_residual(const FormGrid& form, const std::vector<std::complex<double>>& lambdas,
                                 FlatFamily family);

/// Component systems of the neutral harmonic map equation:
///   Solv: phi^k_{z zbar} - mu_k (phi^k_z phi^3_zbar + phi^k_zbar phi^3_z) / 2, phi^3_{z zbar}
///   Nil:  phi^j_{z zbar} (j <= 2n) and
///         (phi^{2n+1} + sum phi^i phi^{n+i} / 2)_{z zbar} - sum (phi^i_z phi^{n+i}_zbar + phi^i_zbar phi^{n+i}_z) / 2
///   SE2:  phi^1_{z zbar} + (phi^2_z phi^3_zbar + phi^2_zbar phi^3_z) / 2,
///         phi^2_{z zbar} - (phi^1_z phi^3_zbar + phi^1_zbar phi^3_z) / 2, phi^3_{z zbar}
ResidualField neutral_harmonicity_field(const MapGrid& grid, const GroupDescriptor& group);
ResidualReport neutral_harmonicity_residual(const MapGrid& grid, const GroupDescriptor& group);

/// Harmonic map equation for the left-invariant metric of G(mu1, mu2):
///   phi^k_{z zbar} - mu_k (phi^k_z phi^3_zbar + phi^k_zbar phi^3_z),
///   phi^3_{z zbar} + sum mu_k e^{-2 mu_k phi^3} phi^k_z phi^k_zbar.
ResidualField metric_harmonicity_field(const MapGrid& grid, const SolvParams& params);
ResidualReport metric_harmonicity_residual(const MapGrid& grid, const SolvParams& params);

/// dbar A + d B + 2 sym(mu)(B, A). The form
/// dbar alpha' - d alpha'' + 2 sym(mu)(alpha'' ^ alpha') has dz ^ dzbar
/// coefficient -(dbar A + d B) - 2 sym(mu)(B, A), the negative of this.
ResidualField general_harmonicity_field(const FormGrid& form, const ConnectionTensor& conn);
ResidualReport general_harmonicity_residual(const FormGrid& form, const ConnectionTensor& conn);

/// sym(mu)(alpha' ^ alpha'')(d_z, d_zbar) = sym(mu)(A, B).
ResidualField admissibility_field(const FormGrid& form, const ConnectionTensor& conn);
ResidualReport admissibility_residual(const FormGrid& form, const ConnectionTensor& conn);

/// [alpha' ^ alpha''](d_z, d_zbar) = [A, B].
ResidualField torsion_free_field(const FormGrid& form);
ResidualReport torsion_free_residual(const FormGrid& form);

/// Maurer-Cartan: dB - dbar A + [A, B].
ResidualField mc_field(const FormGrid& form);
/// Harmonic map equation as a 2-form: -(dbar A + d B) - 2 sym(mu)(B, A).
ResidualField hme_field(const FormGrid& form, const ConnectionTensor& conn);
/// Sum of the two: -2 dbar A + [A, B] - 2 sym(mu)(B, A).
ResidualField pluri_field(const FormGrid& form, const ConnectionTensor& conn);

/// Copy of the field with nodes closer than margin to the domain edge made
/// invalid; refinement studies compare norms over one fixed window this way.
ResidualField restricted(const ResidualField& field, double margin);

/// Max |a - b| over nodes valid in both.
double field_distance(const ResidualField& a, const ResidualField& b);

/// Least-squares slope of log(value) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& value);

}  // namespace loopharm
