#pragma once

// Closed-form example maps, sampled on grids.

#include <vector>

#include "loopharm/liegroup.hpp"
#include "loopharm/mapgrid.hpp"
#include "loopharm/polynomial.hpp"
#include "loopharm/verify.hpp"

namespace loopharm {

/// phi(x, y) = exp(x X) exp(y Y) in group coordinates. Needs a matrix representation.
MapGrid vacuum_map(const Eigen::VectorXd& X, const Eigen::VectorXd& Y, const GroupDescriptor& group,
                   const GridSpec& spec);

/// The horosphere x^3 = 0 of G(1, 1) = H^3, i.e. vacuum_map(e1, e2). With
/// reparametrize, the conformal reparametrization w = z + z^4 / 4 of the same
/// surface, phi = (Re w, Im w, 0), whose sampled residuals are not exact.
MapGrid horosphere(const GridSpec& spec, bool reparametrize = false);

/// Nil_{2n+1} map phi^j = 2 Re f^j; f has 2n + 1 entries, n >= 1.
MapGrid nil_from_holomorphic(const std::vector<HoloPoly>& f, const GridSpec& spec);

/// The hyperbolic paraboloid (x, y, xy / 2) in Nil_3.
MapGrid hyperbolic_paraboloid(const GridSpec& spec);

/// Sol_3 = G(1, -1) map (Re w, -e^{-2c} Im w, c); phi^1 - i e^{2 phi^3} phi^2 = w.
MapGrid sol3_primitive(const HoloPoly& w, double c, const GridSpec& spec);

/// Levi-Civita connection of the standard left-invariant metric on Sol_3.
ConnectionTensor sol3_levi_civita();

/// Both formulations of the SE(2) neutral harmonic map system on one grid.
/// The transformed one uses phi~1 = (phi1 + i phi2)/sqrt2, phi~2 = (phi1 - i phi2)/sqrt2,
/// phi~3 = i phi3 and equals a unitary image of the direct one.
struct SE2CheckReport {
  ResidualReport direct, transformed;
  double discrepancy = 0;       ///< max |R~ - U R| over nodes
  double norm_discrepancy = 0;  ///< |max_norm(R~) - max_norm(R)|
};
SE2CheckReport se2_check_pair(const MapGrid& grid);

}  // namespace loopharm
