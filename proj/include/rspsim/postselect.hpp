#ifndef RSPSIM_POSTSELECT_HPP
#define RSPSIM_POSTSELECT_HPP

#include <optional>
#include <vector>

#include "rspsim/geometry.hpp"
#include "rspsim/quantum.hpp"

namespace rsp {

// One measurement placement: window of `width` around `center_x` in the
// transverse plane `plane_z`. width = 0 is a point detector.
struct DetectorWindow {
    double center_x = 0.0;
    double width = 0.0;
    double plane_z = 0.0;

    void validate(const OpticalGeometry& geom) const;
};

// Window overlap integrals Phi_ij = int_window phi_i(x') phi_j*(x') dx'.
// Hermitian, diagonal real in [0, 1], |Phi_ij|^2 <= Phi_ii Phi_jj.
struct OverlapMatrix {
    int dim = 0;
    std::vector<cplx> phi;  // row-major
    DetectorWindow window;

    cplx at(int i, int j) const { return phi[static_cast<size_t>(i) * dim + j]; }
    double trace_real() const;
};

// Non-normalized conditional ket sum_j phi_j(x, z)|j>.
PureKet point_postselect_ket(const OpticalGeometry& geom, double x, double z,
                             double quad_tol = 1e-9);

// Density scale of the plane: |phi|^2 summed over slits at the envelope
// center of the middle slit. Used for the diffraction-zero cutoff.
double reference_density(const OpticalGeometry& geom, double z,
                         double quad_tol = 1e-9);

// Fraction of reference_density below which a point is treated as degenerate.
inline constexpr double kDegenerateDensityRel = 1e-6;

// State prepared on the far side by a point detection at (x, z): the
// anti-correlated resource swaps the slit roles and conjugates,
// |psi> = N (phi_r* |l> + phi_l* |r>). Throws degenerate_point_error on
// diffraction zeros. Qubit geometry only.
PureKet remote_target_point(const OpticalGeometry& geom, double x, double z,
                            double quad_tol = 1e-9);
std::optional<PureKet> try_remote_target_point(const OpticalGeometry& geom,
                                               double x, double z,
                                               double quad_tol = 1e-9);

OverlapMatrix overlap_matrix(const OpticalGeometry& geom, const DetectorWindow& w,
                             double rel_tol = 1e-9, double quad_tol = 1e-9);

// Phi_jj only; cheaper when the coherences are not needed.
double overlap_diagonal(const OpticalGeometry& geom, const DetectorWindow& w,
                        int slit, double rel_tol = 1e-9, double quad_tol = 1e-9);

// Finite-resolution remotely prepared state,
//   rho = N [[Phi_rr, Phi_lr], [Phi_rl, Phi_ll]] in the (|l>, |r>) basis.
DensityOperator remote_state_finite(const OpticalGeometry& geom,
                                    const DetectorWindow& w,
                                    double quad_tol = 1e-9);

// P = (Phi_rr + Phi_ll) / 2.
double prep_probability(const OpticalGeometry& geom, const DetectorWindow& w,
                        double quad_tol = 1e-9);

// Fidelity of the finite-resolution state against the point target at the
// window center. Closed form <phi|S|phi> / (||phi||^2 Tr S); agrees with
// fidelity(remote_target_point, remote_state_finite).
double prep_fidelity(const OpticalGeometry& geom, const DetectorWindow& w,
                     double quad_tol = 1e-9);

// Purity sum |Phi_ij|^2 / (Phi_rr + Phi_ll)^2.
double prep_purity(const OpticalGeometry& geom, const DetectorWindow& w,
                   double quad_tol = 1e-9);

// All three figures sharing one overlap evaluation.
FigureTriple prep_figures(const OpticalGeometry& geom, const DetectorWindow& w,
                          double quad_tol = 1e-9);

// As prep_figures, but from precomputed pieces (used by the sweep).
FigureTriple figures_from_overlap(const OverlapMatrix& phi, cplx amp_l, cplx amp_r);

struct InversionCandidate {
    double x = 0.0;
    double z = 0.0;
    double angle = 0.0;        // Bloch angle to the requested target
    double probability = 0.0;  // prep_probability at the candidate
};

// Grid points whose point-prepared state matches `target` within
// `angle_tol` (Bloch angle, radians), sorted by probability descending.
// `detector_width` sets the window used for the probability ranking.
std::vector<InversionCandidate> invert_target(
    const OpticalGeometry& geom, const PureKet& target,
    const std::vector<double>& z_grid, const std::vector<double>& x_grid,
    double detector_width, double angle_tol = 1e-3, double quad_tol = 1e-9);

}  // namespace rsp

#endif
