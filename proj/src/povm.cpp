#include "rspsim/povm.hpp"

#include <cmath>
#include <numbers>

namespace rsp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

void require_qubit(const OpticalGeometry& geom) {
    if (geom.num_slits != 2)
        throw domain_error("the generalized measurement is defined for the double slit");
}

// Port amplitudes <p|theta_n> for n = l, r with theta_l = Theta,
// theta_r = pi/4 - Theta. <H|theta> = cos 2theta, <V|theta> = sin 2theta.
struct PortWeights {
    double wl;  // <p|theta_l>
    double wr;  // <p|theta_r>
};

PortWeights port_weights(const PovmSettings& s, Port p) {
    const double c = std::cos(2.0 * s.theta);
    const double sn = std::sin(2.0 * s.theta);
    // cos(2 theta_r) = sin(2 Theta), sin(2 theta_r) = cos(2 Theta)
    if (p == Port::H) return {c, sn};
    return {sn, c};
}
}  // namespace

double DetectorLayout::position(const Outcome& o) const {
    if (o.port == Port::V) return o.pixel == 1 ? x1v : x2v;
    return o.pixel == 1 ? x1h : x2h;
}

Mat2 pauli_matrix(PauliOp op) {
    switch (op) {
        case PauliOp::I: return {1.0, 0.0, 0.0, 1.0};
        case PauliOp::X: return {0.0, 1.0, 1.0, 0.0};
        case PauliOp::Y: return {0.0, -kI, kI, 0.0};
        case PauliOp::Z: return {1.0, 0.0, 0.0, -1.0};
    }
    return {};
}

const char* pauli_name(PauliOp op) {
    switch (op) {
        case PauliOp::I: return "I";
        case PauliOp::X: return "sigma_x";
        case PauliOp::Y: return "sigma_y";
        case PauliOp::Z: return "sigma_z";
    }
    return "?";
}

double detector_half_period(const OpticalGeometry& geom) {
    return kPi * geom.focal_length / (geom.wavenumber() * geom.slit_separation);
}

double wrap_position(double x, double half_period) {
    const double period = 2.0 * half_period;
    double m = std::fmod(x + half_period, period);
    if (m < 0.0) m += period;
    return m - half_period;
}

std::pair<Mat2, Mat2> povm_elements(double theta) {
    const double c2 = std::cos(2.0 * theta) * std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta) * std::sin(2.0 * theta);
    const Mat2 pi_h = {cplx(c2, 0.0), 0.0, 0.0, cplx(s2, 0.0)};
    const Mat2 pi_v = {cplx(1.0 - c2, 0.0), 0.0, 0.0, cplx(1.0 - s2, 0.0)};
    return {pi_h, pi_v};
}

PovmSettings settings_for_target(const PureKet& target) {
    if (target.dim() != 2) throw domain_error("qubit target required");
    const PureKet t = target.normalized();
    PovmSettings s;
    s.theta = 0.5 * std::acos(std::clamp(std::abs(t.amp[0]), 0.0, 1.0));
    const double al = std::abs(t.amp[0]);
    const double be = std::abs(t.amp[1]);
    s.chi = (al < 1e-15 || be < 1e-15)
                ? 0.0
                : std::arg(t.amp[1] * std::conj(t.amp[0]));
    return s;
}

DetectorLayout detector_layout(const PovmSettings& s, const OpticalGeometry& geom) {
    require_qubit(geom);
    DetectorLayout lay;
    lay.half_period = detector_half_period(geom);
    const double k = geom.wavenumber();
    lay.x1v = wrap_position(s.chi * geom.focal_length / (k * geom.slit_separation),
                            lay.half_period);
    lay.x2v = wrap_position(lay.x1v + lay.half_period, lay.half_period);
    lay.x1h = -lay.x1v;
    lay.x2h = -lay.x2v;
    return lay;
}

std::pair<PureKet, PauliOp> point_prepared_state(const PovmSettings& s,
                                                 const Outcome& o,
                                                 const OpticalGeometry& geom) {
    require_qubit(geom);
    const cplx alpha = std::cos(2.0 * s.theta);
    const cplx beta = std::polar(std::sin(2.0 * s.theta), s.chi);
    if (o.port == Port::V && o.pixel == 1) return {PureKet(alpha, beta), PauliOp::I};
    if (o.port == Port::V && o.pixel == 2) return {PureKet(alpha, -beta), PauliOp::Z};
    if (o.port == Port::H && o.pixel == 1) return {PureKet(beta, alpha), PauliOp::X};
    if (o.port == Port::H && o.pixel == 2) return {PureKet(beta, -alpha), PauliOp::Y};
    throw domain_error("outcome pixel must be 1 or 2");
}

DensityOperator remote_state_povm_finite(const PovmSettings& s, const Outcome& o,
                                         const OpticalGeometry& geom, double dx,
                                         double quad_tol) {
    require_qubit(geom);
    const DetectorLayout lay = detector_layout(s, geom);
    const double x = lay.position(o);
    const OverlapMatrix phi =
        overlap_matrix(geom, {x, dx, geom.focal_length}, 1e-9, quad_tol);
    const PortWeights w = port_weights(s, o.port);

    // rho ~ |w_r|^2 Phi_rr |l><l| + w_r w_l Phi_lr |l><r| + h.c.
    //       + |w_l|^2 Phi_ll |r><r|
    DensityOperator rho(2);
    rho.at(0, 0) = w.wr * w.wr * phi.at(1, 1);
    rho.at(0, 1) = w.wr * w.wl * phi.at(0, 1);
    rho.at(1, 0) = std::conj(rho.at(0, 1));
    rho.at(1, 1) = w.wl * w.wl * phi.at(0, 0);
    const double tr = rho.trace_real();
    if (!(tr > 1e-30))
        throw degenerate_window_error("POVM detector window collects no probability");
    for (cplx& c : rho.m) c /= tr;
    return rho;
}

double total_probability(const PovmSettings& s, const OpticalGeometry& geom,
                         double dx, double quad_tol) {
    require_qubit(geom);
    if (dx == 0.0) return 0.0;
    const DetectorLayout lay = detector_layout(s, geom);
    const double f = geom.focal_length;
    double p = 0.0;
    for (double x : {lay.x1v, lay.x2v, lay.x1h, lay.x2h})
        p += 0.5 * overlap_diagonal(geom, {x, dx, f}, kSlitLeft, 1e-9, quad_tol);
    return p;
}

double povm_fidelity_from_overlap(const PovmSettings& s, const Outcome& o,
                                  const OpticalGeometry& geom, double x_jp,
                                  const OverlapMatrix& phi) {
    const PortWeights w = port_weights(s, o.port);
    const double wl2 = w.wl * w.wl;
    const double wr2 = w.wr * w.wr;
    const double kd_over_f =
        geom.wavenumber() * geom.slit_separation / geom.focal_length;
    const cplx carrier = std::polar(1.0, kd_over_f * x_jp);
    const double phi_rr = phi.at(1, 1).real();
    const double phi_ll = phi.at(0, 0).real();
    const double num = wr2 * wr2 * phi_rr + wl2 * wl2 * phi_ll +
                       2.0 * wl2 * wr2 * (carrier * phi.at(0, 1)).real();
    const double den = wr2 * phi_rr + wl2 * phi_ll;
    if (!(den > 1e-30))
        throw degenerate_window_error("POVM detector window collects no probability");
    return std::clamp(num / den, 0.0, 1.0);
}

double povm_purity_from_overlap(const PovmSettings& s, const Outcome& o,
                                const OverlapMatrix& phi) {
    const PortWeights w = port_weights(s, o.port);
    const double A = w.wr * w.wr * phi.at(1, 1).real();
    const double B = w.wl * w.wl * phi.at(0, 0).real();
    const double C2 = w.wl * w.wl * w.wr * w.wr * std::norm(phi.at(0, 1));
    const double tr = A + B;
    if (!(tr > 1e-30))
        throw degenerate_window_error("POVM detector window collects no probability");
    return std::clamp((A * A + B * B + 2.0 * C2) / (tr * tr), 0.0, 1.0);
}

double povm_fidelity(const PovmSettings& s, const Outcome& o,
                     const OpticalGeometry& geom, double dx, double quad_tol) {
    require_qubit(geom);
    const DetectorLayout lay = detector_layout(s, geom);
    const double x = lay.position(o);
    if (dx == 0.0) return 1.0;  // point-detector limit
    const OverlapMatrix phi =
        overlap_matrix(geom, {x, dx, geom.focal_length}, 1e-9, quad_tol);
    return povm_fidelity_from_overlap(s, o, geom, x, phi);
}

double povm_purity(const PovmSettings& s, const Outcome& o,
                   const OpticalGeometry& geom, double dx, double quad_tol) {
    require_qubit(geom);
    if (dx == 0.0) return 1.0;
    const DetectorLayout lay = detector_layout(s, geom);
    const double x = lay.position(o);
    const OverlapMatrix phi =
        overlap_matrix(geom, {x, dx, geom.focal_length}, 1e-9, quad_tol);
    return povm_purity_from_overlap(s, o, phi);
}

}  // namespace rsp
