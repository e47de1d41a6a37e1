#include "rspsim/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rspsim/quadrature.hpp"

namespace rsp {

namespace {
constexpr double kPi = std::numbers::pi;

// Tolerate one part in 1e12 of drift on the interval ends from stepped scans.
bool in_plane_range(const OpticalGeometry& g, double z) {
    const double slack = 1e-12 * g.focal_length;
    return z >= g.focal_length - slack && z <= 2.0 * g.focal_length + slack;
}

[[noreturn]] void throw_plane_range(const OpticalGeometry& g, double z) {
    throw domain_error("detection plane z = " + std::to_string(z) +
                       " outside [f, 2f] = [" + std::to_string(g.focal_length) +
                       ", " + std::to_string(2.0 * g.focal_length) + "] m");
}
}  // namespace

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Fraunhofer: return "fraunhofer";
        case Regime::Fresnel: return "fresnel";
        case Regime::ImagePlane: return "image_plane";
    }
    return "?";
}

double OpticalGeometry::slit_offset(int ordinal) const {
    if (ordinal < 0 || ordinal >= num_slits)
        throw domain_error("slit ordinal " + std::to_string(ordinal) +
                           " out of range for " + std::to_string(num_slits) + " slits");
    if (num_slits == 2)
        return ordinal == kSlitLeft ? -0.5 * slit_separation : 0.5 * slit_separation;
    const int ell = (num_slits - 1) / 2;
    return static_cast<double>(ordinal - ell) * slit_separation;
}

void OpticalGeometry::validate() const {
    if (!(slit_half_width > 0.0)) throw domain_error("slit half-width must be positive");
    if (!(slit_separation > 2.0 * slit_half_width))
        throw domain_error("slit separation must exceed the slit width (d > 2a)");
    if (!(wavelength > 0.0)) throw domain_error("wavelength must be positive");
    if (!(focal_length > 0.0)) throw domain_error("focal length must be positive");
    if (num_slits != 2 && (num_slits < 3 || num_slits % 2 == 0))
        throw domain_error("slit count must be 2 or an odd integer >= 3");
    if (aperture_distance < 0.0) throw domain_error("aperture distance must be >= 0");
}

PropagationParams propagation_params(const OpticalGeometry& geom, double z) {
    if (!in_plane_range(geom, z)) throw_plane_range(geom, z);
    const double f = geom.focal_length;
    const double k = geom.wavenumber();
    const double a = geom.slit_half_width;

    PropagationParams p;
    p.scale_factor = (z - f) / f;
    p.eta_z = 2.0 * f - z;  // eta * Z, finite on the whole interval
    if (z <= f) {
        p.effective_distance = std::numeric_limits<double>::infinity();
        p.phase_parameter = 0.0;
    } else if (p.eta_z <= 0.0) {
        p.effective_distance = 0.0;
        p.phase_parameter = std::numeric_limits<double>::infinity();
    } else {
        p.effective_distance = f * p.eta_z / (z - f);
        // kappa = k a^2 / 2Z, written without the intermediate Z
        p.phase_parameter = k * a * a * (z - f) / (2.0 * f * p.eta_z);
    }
    return p;
}

Regime classify_regime(const OpticalGeometry& geom, double z, double kappa_threshold) {
    if (!in_plane_range(geom, z)) throw_plane_range(geom, z);
    if (std::abs(2.0 * geom.focal_length - z) <= kImagePlaneBand) return Regime::ImagePlane;
    const PropagationParams p = propagation_params(geom, z);
    return p.phase_parameter <= kappa_threshold ? Regime::Fraunhofer : Regime::Fresnel;
}

std::complex<double> fraunhofer_amplitude(const OpticalGeometry& geom, int slit,
                                          double x, double z) {
    const PropagationParams p = propagation_params(geom, z);
    const double k = geom.wavenumber();
    const double a = geom.slit_half_width;
    const double delta = geom.slit_offset(slit);
    const double ez = p.eta_z;
    const double amp = std::sqrt(k * a / (kPi * ez));
    const double phase = k * delta * x / ez;
    const double envelope = sinc(k * a * (x + delta * p.scale_factor) / ez);
    return std::polar(amp * envelope, phase);
}

namespace {

struct FresnelPieces {
    double p;        // linear phase rate of the slit integral
    double q;        // quadratic phase rate
    double prefactor;
    double carrier;  // k delta x / eta Z
};

FresnelPieces fresnel_pieces(const OpticalGeometry& geom, int slit, double x,
                             double z) {
    const double f = geom.focal_length;
    if (!(z > f) || !(z < 2.0 * f))
        throw domain_error("fresnel amplitude requires f < z < 2f");
    const PropagationParams pp = propagation_params(geom, z);
    const double k = geom.wavenumber();
    const double a = geom.slit_half_width;
    const double delta = geom.slit_offset(slit);
    const double ez = pp.eta_z;
    FresnelPieces out;
    out.p = k * (x + pp.scale_factor * delta) / ez;
    out.q = 0.5 * k / pp.effective_distance;
    out.prefactor = std::sqrt(k / (4.0 * kPi * a * ez));
    out.carrier = k * delta * x / ez;
    return out;
}

std::complex<double> fresnel_panel_integral(const OpticalGeometry& geom,
                                            const FresnelPieces& fp,
                                            double quad_tol) {
    const double a = geom.slit_half_width;
    const double excursion = std::abs(fp.p) * a + fp.q * a * a;
    const int panels =
        std::max(16, 8 * static_cast<int>(std::ceil(excursion / (2.0 * kPi))));
    const double p = fp.p;
    const double q = fp.q;
    auto integrand = [p, q](double s) {
        const double w = (p + q * s) * s;
        return std::complex<double>(std::cos(w), std::sin(w));
    };
    // Tolerance is taken relative to the slit width (the integrand has unit
    // modulus), so near-zeros of the integral do not stall the refinement.
    return quad::integrate_refined(integrand, -a, a, panels, quad_tol, 2.0 * a).value;
}

}  // namespace

std::complex<double> fresnel_amplitude(const OpticalGeometry& geom, int slit,
                                       double x, double z, double quad_tol) {
    const FresnelPieces fp = fresnel_pieces(geom, slit, x, z);
    const double a = geom.slit_half_width;
    const double excursion = std::abs(fp.p) * a + fp.q * a * a;
    const std::complex<double> integral =
        excursion <= kFresnelClosedFormPhase
            ? fresnel_panel_integral(geom, fp, quad_tol)
            : quad::quadratic_phase_integral(fp.p, fp.q, a);
    return fp.prefactor * std::polar(1.0, fp.carrier) * integral;
}

namespace detail {
std::complex<double> fresnel_amplitude_quadrature(const OpticalGeometry& geom,
                                                  int slit, double x, double z,
                                                  double quad_tol) {
    const FresnelPieces fp = fresnel_pieces(geom, slit, x, z);
    return fp.prefactor * std::polar(1.0, fp.carrier) *
           fresnel_panel_integral(geom, fp, quad_tol);
}
}  // namespace detail

std::complex<double> image_plane_amplitude(const OpticalGeometry& geom, int slit,
                                           double x) {
    const double a = geom.slit_half_width;
    const double center = -geom.slit_offset(slit);  // inverted, |M| = 1
    if (std::abs(x - center) < a) return {1.0 / std::sqrt(2.0 * a), 0.0};
    return {0.0, 0.0};
}

std::complex<double> slit_amplitude(const OpticalGeometry& geom, int slit,
                                    double x, double z, double quad_tol) {
    switch (classify_regime(geom, z)) {
        case Regime::ImagePlane:
            return image_plane_amplitude(geom, slit, x);
        case Regime::Fraunhofer:
            return fraunhofer_amplitude(geom, slit, x, z);
        case Regime::Fresnel:
            return fresnel_amplitude(geom, slit, x, z, quad_tol);
    }
    return {0.0, 0.0};
}

}  // namespace rsp
