#ifndef RSPSIM_POVM_HPP
#define RSPSIM_POVM_HPP

#include <array>
#include <utility>

#include "rspsim/geometry.hpp"
#include "rspsim/postselect.hpp"
#include "rspsim/quantum.hpp"

namespace rsp {

using Mat2 = std::array<cplx, 4>;  // row-major 2x2

// Wave-plate configuration of the two-outcome generalized measurement.
// theta_l = Theta, theta_r = pi/4 - Theta; chi is the target's relative phase.
struct PovmSettings {
    double theta = 0.0;  // Theta, in [0, pi/4] for |alpha| in [0, 1]
    double chi = 0.0;    // arg(beta/alpha), in (-pi, pi]

    double theta_r() const { return 0.25 * std::numbers::pi - theta; }
};

enum class Port { H, V };

struct Outcome {
    int pixel = 1;  // 1 or 2
    Port port = Port::V;
};

// The four constrained detector positions at the focal plane.
struct DetectorLayout {
    double x1v = 0.0;
    double x2v = 0.0;
    double x1h = 0.0;
    double x2h = 0.0;
    double half_period = 0.0;  // L = pi f / (k d)

    double position(const Outcome& o) const;
};

enum class PauliOp { I, X, Y, Z };

Mat2 pauli_matrix(PauliOp op);
const char* pauli_name(PauliOp op);

// L = pi f / k d = lambda f / 2d.
double detector_half_period(const OpticalGeometry& geom);

// Wrap into [-L, L): ((x + L) mod 2L) - L.
double wrap_position(double x, double half_period);

// POVM elements on the spatial qubit, (Pi_H, Pi_V), diagonal in the slit
// basis. Pi_H = diag(cos^2 2Theta, sin^2 2Theta); Pi_V is built as the literal
// complement so Pi_H + Pi_V = I holds bit-exactly.
std::pair<Mat2, Mat2> povm_elements(double theta);

// Theta = 1/2 arccos |alpha|, chi = arg(beta/alpha) (0 at the poles).
PovmSettings settings_for_target(const PureKet& target);

// x1V = (f/kd) chi; x2p = x1p (+) L; xjH = -xjV.
DetectorLayout detector_layout(const PovmSettings& s, const OpticalGeometry& geom);

// Ideal point-detector preparation: the ket Bob holds before correction and
// the Pauli he must apply to recover the target.
std::pair<PureKet, PauliOp> point_prepared_state(const PovmSettings& s,
                                                 const Outcome& o,
                                                 const OpticalGeometry& geom);

// Finite-resolution prepared state for one outcome, detectors at the focal
// plane with width dx.
DensityOperator remote_state_povm_finite(const PovmSettings& s, const Outcome& o,
                                         const OpticalGeometry& geom, double dx,
                                         double quad_tol = 1e-9);

// P_tot = sum over the four detectors of Phi_ll(x_jp, dx, f) / 2.
double total_probability(const PovmSettings& s, const OpticalGeometry& geom,
                         double dx, double quad_tol = 1e-9);

double povm_fidelity(const PovmSettings& s, const Outcome& o,
                     const OpticalGeometry& geom, double dx,
                     double quad_tol = 1e-9);

double povm_purity(const PovmSettings& s, const Outcome& o,
                   const OpticalGeometry& geom, double dx,
                   double quad_tol = 1e-9);

// Closed forms evaluated from a precomputed focal-plane overlap matrix at the
// outcome's detector position (scan loops reuse cached overlaps through these).
double povm_fidelity_from_overlap(const PovmSettings& s, const Outcome& o,
                                  const OpticalGeometry& geom, double x_jp,
                                  const OverlapMatrix& phi);
double povm_purity_from_overlap(const PovmSettings& s, const Outcome& o,
                                const OverlapMatrix& phi);

}  // namespace rsp

#endif
