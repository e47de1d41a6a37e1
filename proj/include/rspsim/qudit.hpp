#ifndef RSPSIM_QUDIT_HPP
#define RSPSIM_QUDIT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "rspsim/geometry.hpp"
#include "rspsim/postselect.hpp"
#include "rspsim/quantum.hpp"

namespace rsp {

// Per-slit wave-plate angles and phase shifts, indexed by slit ordinal
// (slit j = ordinal - (D-1)/2).
struct SlitArraySettings {
    std::vector<double> theta;  // each in [0, pi/4]
    std::vector<double> phase;  // each in (-pi, pi]

    int dim() const { return static_cast<int>(theta.size()); }
};

// Two-qudit resource (1/sqrt(D)) sum_j e^{i mu_j} |j>_A |-j>_B, with
// mu_j = k d^2 j^2 / (2 z_ap) when with_mu. Composite index a*D + b.
PureKet entangled_qudit_state(const OpticalGeometry& geom, int dim, bool with_mu);

// sum_j phi_j(x, z) |j>, non-normalized.
PureKet qudit_postselect_ket(const OpticalGeometry& geom, double x, double z,
                             double quad_tol = 1e-9);

// theta_j = 1/2 arccos |c_{-j}|, phase_j = arg(c_{-j}); the j <-> -j
// reflection comes from the anti-correlated resource.
SlitArraySettings qudit_settings_for_target(const PureKet& target);

// State left with Bob after the H outcome and the fixed focal-plane x = 0
// detection, plus the H-outcome probability (1/D for target-derived
// settings). The V outcome is discarded; its probability is 1 - returned.
std::pair<PureKet, double> qudit_prepared_state(const SlitArraySettings& settings,
                                                int dim);

struct ReachabilityReport {
    int total = 0;
    int matched = 0;
    double fraction = 0.0;
};

// Samples random pure targets and reports how many are matched by some grid
// point's postselection ket with fidelity >= 1 - fid_tol.
ReachabilityReport qudit_postselect_reachability(
    const OpticalGeometry& geom, int dim, const std::vector<double>& z_grid,
    const std::vector<double>& x_grid, int n_samples, std::uint64_t seed,
    double fid_tol = 1e-3, double quad_tol = 1e-9);

}  // namespace rsp

#endif
