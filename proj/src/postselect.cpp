#include "rspsim/postselect.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rspsim/quadrature.hpp"

namespace rsp {

namespace {

constexpr double kPi = std::numbers::pi;

void require_qubit(const OpticalGeometry& geom) {
    if (geom.num_slits != 2)
        throw domain_error("operation is defined for the double slit (2 slits)");
}

// Upper bound on the local oscillation rate (rad/m) of phi_i phi_j* inside
// the window. The slit-carrier phases cancel in the product; what remains is
// the inter-slit beat plus, in the Fresnel zone, the boundary-wave chirp.
double product_phase_rate(const OpticalGeometry& geom, const DetectorWindow& w,
                          Regime regime) {
    const PropagationParams p = propagation_params(geom, w.plane_z);
    const double k = geom.wavenumber();
    const double a = geom.slit_half_width;
    const double span = geom.slit_offset(geom.num_slits - 1) - geom.slit_offset(0);
    double rate = k * (span + 2.0 * a) / p.eta_z;
    if (regime == Regime::Fresnel) {
        const double q = 0.5 * k / p.effective_distance;
        const double eta = p.scale_factor;
        const double reach =
            std::abs(w.center_x) + 0.5 * w.width + 0.5 * eta * span + eta * a;
        rate += 2.0 * q * (a + reach / eta) / eta;
    }
    return rate;
}

OverlapMatrix image_plane_overlap(const OpticalGeometry& geom, const DetectorWindow& w) {
    OverlapMatrix out;
    out.dim = geom.num_slits;
    out.window = w;
    out.phi.assign(static_cast<size_t>(out.dim) * out.dim, cplx(0.0, 0.0));
    const double a = geom.slit_half_width;
    const double lo = w.center_x - 0.5 * w.width;
    const double hi = w.center_x + 0.5 * w.width;
    for (int j = 0; j < out.dim; ++j) {
        const double c = -geom.slit_offset(j);
        const double olo = std::max(lo, c - a);
        const double ohi = std::min(hi, c + a);
        if (ohi > olo)
            out.phi[static_cast<size_t>(j) * out.dim + j] = (ohi - olo) / (2.0 * a);
    }
    return out;
}

}  // namespace

void DetectorWindow::validate(const OpticalGeometry& geom) const {
    if (width < 0.0) throw domain_error("detector width must be >= 0");
    // plane range enforced by the amplitude evaluation
    propagation_params(geom, plane_z);
}

double OverlapMatrix::trace_real() const {
    double t = 0.0;
    for (int i = 0; i < dim; ++i) t += at(i, i).real();
    return t;
}

PureKet point_postselect_ket(const OpticalGeometry& geom, double x, double z,
                             double quad_tol) {
    PureKet ket(geom.num_slits);
    for (int j = 0; j < geom.num_slits; ++j)
        ket.amp[j] = slit_amplitude(geom, j, x, z, quad_tol);
    return ket;
}

double reference_density(const OpticalGeometry& geom, double z, double quad_tol) {
    const PropagationParams p = propagation_params(geom, z);
    const int middle = geom.num_slits == 2 ? kSlitLeft : (geom.num_slits - 1) / 2;
    const double x_c = -p.scale_factor * geom.slit_offset(middle);
    return point_postselect_ket(geom, x_c, z, quad_tol).norm_sq();
}

std::optional<PureKet> try_remote_target_point(const OpticalGeometry& geom,
                                               double x, double z, double quad_tol) {
    require_qubit(geom);
    const PureKet phi = point_postselect_ket(geom, x, z, quad_tol);
    if (phi.norm_sq() <= kDegenerateDensityRel * reference_density(geom, z, quad_tol))
        return std::nullopt;
    PureKet target(std::conj(phi.amp[kSlitRight]), std::conj(phi.amp[kSlitLeft]));
    return target.normalize();
}

PureKet remote_target_point(const OpticalGeometry& geom, double x, double z,
                            double quad_tol) {
    auto t = try_remote_target_point(geom, x, z, quad_tol);
    if (!t)
        throw degenerate_point_error("detector position sits on a diffraction zero");
    return *t;
}

OverlapMatrix overlap_matrix(const OpticalGeometry& geom, const DetectorWindow& w,
                             double rel_tol, double quad_tol) {
    w.validate(geom);
    const int dim = geom.num_slits;
    OverlapMatrix out;
    out.dim = dim;
    out.window = w;
    out.phi.assign(static_cast<size_t>(dim) * dim, cplx(0.0, 0.0));
    if (w.width == 0.0) return out;

    const Regime regime = classify_regime(geom, w.plane_z);
    if (regime == Regime::ImagePlane) return image_plane_overlap(geom, w);

    const double lo = w.center_x - 0.5 * w.width;
    const double hi = w.center_x + 0.5 * w.width;
    const double cycles = product_phase_rate(geom, w, regime) * w.width / (2.0 * kPi);
    int panels = std::max(4, static_cast<int>(std::ceil(1.25 * cycles)) + 1);

    std::vector<cplx> amps(dim);
    auto accumulate = [&](int n_panels, std::vector<cplx>& acc) {
        acc.assign(static_cast<size_t>(dim) * dim, cplx(0.0, 0.0));
        const double h = (hi - lo) / n_panels;
        for (int p = 0; p < n_panels; ++p) {
            const double mid = lo + (p + 0.5) * h;
            const double half = 0.5 * h;
            for (int n = 0; n < 8; ++n) {
                const int half_idx = n / 2;
                const double sign = (n % 2 == 0) ? -1.0 : 1.0;
                const double xq = mid + sign * half * quad::kGl8Nodes[half_idx];
                const double wq = half * quad::kGl8Weights[half_idx];
                for (int j = 0; j < dim; ++j)
                    amps[j] = slit_amplitude(geom, j, xq, w.plane_z, quad_tol);
                for (int i = 0; i < dim; ++i)
                    for (int j = i; j < dim; ++j)
                        acc[static_cast<size_t>(i) * dim + j] +=
                            wq * amps[i] * std::conj(amps[j]);
            }
        }
    };

    std::vector<cplx> coarse, fine;
    accumulate(panels, coarse);
    bool converged = false;
    double achieved = 0.0;
    for (int round = 0; round < 10; ++round) {
        panels *= 2;
        accumulate(panels, fine);
        double diff = 0.0;
        double tr = 0.0;
        for (int i = 0; i < dim; ++i) tr += fine[static_cast<size_t>(i) * dim + i].real();
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j)
                diff = std::max(diff,
                                std::abs(fine[static_cast<size_t>(i) * dim + j] -
                                         coarse[static_cast<size_t>(i) * dim + j]));
        const double scale = std::max(tr, 1e-300);
        achieved = diff / scale;
        if (achieved <= rel_tol) {
            converged = true;
            break;
        }
        coarse.swap(fine);
    }
    if (!converged)
        throw numeric_error("window overlap integral did not converge", achieved);

    for (int i = 0; i < dim; ++i) {
        for (int j = i; j < dim; ++j) {
            const cplx v = fine[static_cast<size_t>(i) * dim + j];
            out.phi[static_cast<size_t>(i) * dim + j] = i == j ? cplx(v.real(), 0.0) : v;
            if (i != j) out.phi[static_cast<size_t>(j) * dim + i] = std::conj(v);
        }
    }
    return out;
}

double overlap_diagonal(const OpticalGeometry& geom, const DetectorWindow& w,
                        int slit, double rel_tol, double quad_tol) {
    w.validate(geom);
    if (w.width == 0.0) return 0.0;
    const Regime regime = classify_regime(geom, w.plane_z);
    if (regime == Regime::ImagePlane)
        return image_plane_overlap(geom, w)
            .phi[static_cast<size_t>(slit) * geom.num_slits + slit]
            .real();

    const double lo = w.center_x - 0.5 * w.width;
    const double hi = w.center_x + 0.5 * w.width;
    // |phi_j|^2 has no inter-slit beat; the single-slit bound is enough.
    const double cycles = product_phase_rate(geom, w, regime) * w.width / (2.0 * kPi);
    const int panels = std::max(4, static_cast<int>(std::ceil(1.25 * cycles)) + 1);
    auto integrand = [&](double xq) {
        return std::norm(slit_amplitude(geom, slit, xq, w.plane_z, quad_tol));
    };
    return quad::integrate_refined(integrand, lo, hi, panels, rel_tol).value;
}

DensityOperator remote_state_finite(const OpticalGeometry& geom,
                                    const DetectorWindow& w, double quad_tol) {
    require_qubit(geom);
    const OverlapMatrix phi = overlap_matrix(geom, w, 1e-9, quad_tol);
    const double tr = phi.trace_real();
    if (!(tr > 1e-30))
        throw degenerate_window_error("detector window collects no probability");
    DensityOperator rho(2);
    rho.at(0, 0) = phi.at(1, 1) / tr;
    rho.at(0, 1) = phi.at(0, 1) / tr;
    rho.at(1, 0) = phi.at(1, 0) / tr;
    rho.at(1, 1) = phi.at(0, 0) / tr;
    return rho;
}

double prep_probability(const OpticalGeometry& geom, const DetectorWindow& w,
                        double quad_tol) {
    require_qubit(geom);
    if (w.width == 0.0) return 0.0;
    return 0.5 * overlap_matrix(geom, w, 1e-9, quad_tol).trace_real();
}

FigureTriple figures_from_overlap(const OverlapMatrix& phi, cplx amp_l, cplx amp_r) {
    FigureTriple out;
    const double tr = phi.trace_real();
    out.probability = 0.5 * tr;
    if (!(tr > 1e-30))
        throw degenerate_window_error("detector window collects no probability");

    const double point_density = std::norm(amp_l) + std::norm(amp_r);
    // F = <phi|S|phi> / (||phi||^2 Tr S); the slit-swap and conjugation of the
    // remote state cancel against those of the point target.
    cplx quad_form = std::conj(amp_l) * phi.at(0, 0) * amp_l +
                     std::conj(amp_l) * phi.at(0, 1) * amp_r +
                     std::conj(amp_r) * phi.at(1, 0) * amp_l +
                     std::conj(amp_r) * phi.at(1, 1) * amp_r;
    out.fidelity = std::clamp(quad_form.real() / (point_density * tr), 0.0, 1.0);

    double sum_sq = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sum_sq += std::norm(phi.at(i, j));
    out.purity = std::clamp(sum_sq / (tr * tr), 0.0, 1.0);
    return out;
}

double prep_fidelity(const OpticalGeometry& geom, const DetectorWindow& w,
                     double quad_tol) {
    require_qubit(geom);
    const PureKet phi_pt = point_postselect_ket(geom, w.center_x, w.plane_z, quad_tol);
    if (phi_pt.norm_sq() <=
        kDegenerateDensityRel * reference_density(geom, w.plane_z, quad_tol))
        throw degenerate_point_error("window center sits on a diffraction zero");
    if (w.width == 0.0) return 1.0;  // point-detector limit
    const OverlapMatrix phi = overlap_matrix(geom, w, 1e-9, quad_tol);
    return figures_from_overlap(phi, phi_pt.amp[0], phi_pt.amp[1]).fidelity;
}

double prep_purity(const OpticalGeometry& geom, const DetectorWindow& w,
                   double quad_tol) {
    require_qubit(geom);
    if (w.width == 0.0) return 1.0;  // point-detector limit
    const OverlapMatrix phi = overlap_matrix(geom, w, 1e-9, quad_tol);
    const double tr = phi.trace_real();
    if (!(tr > 1e-30))
        throw degenerate_window_error("detector window collects no probability");
    double sum_sq = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) sum_sq += std::norm(phi.at(i, j));
    return std::clamp(sum_sq / (tr * tr), 0.0, 1.0);
}

FigureTriple prep_figures(const OpticalGeometry& geom, const DetectorWindow& w,
                          double quad_tol) {
    require_qubit(geom);
    const PureKet phi_pt = point_postselect_ket(geom, w.center_x, w.plane_z, quad_tol);
    if (phi_pt.norm_sq() <=
        kDegenerateDensityRel * reference_density(geom, w.plane_z, quad_tol))
        throw degenerate_point_error("window center sits on a diffraction zero");
    const OverlapMatrix phi = overlap_matrix(geom, w, 1e-9, quad_tol);
    return figures_from_overlap(phi, phi_pt.amp[0], phi_pt.amp[1]);
}

std::vector<InversionCandidate> invert_target(
    const OpticalGeometry& geom, const PureKet& target,
    const std::vector<double>& z_grid, const std::vector<double>& x_grid,
    double detector_width, double angle_tol, double quad_tol) {
    require_qubit(geom);
    const PureKet t = target.normalized();
    std::vector<InversionCandidate> found;
    for (double z : z_grid) {
        for (double x : x_grid) {
            const auto psi = try_remote_target_point(geom, x, z, quad_tol);
            if (!psi) continue;
            const double angle = bloch_angle(*psi, t);
            if (angle > angle_tol) continue;
            InversionCandidate c;
            c.x = x;
            c.z = z;
            c.angle = angle;
            c.probability =
                prep_probability(geom, {x, detector_width, z}, quad_tol);
            found.push_back(c);
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        if (a.z != b.z) return a.z < b.z;
        return a.x < b.x;
    });
    return found;
}

}  // namespace rsp
