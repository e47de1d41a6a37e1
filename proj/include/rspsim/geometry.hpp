#ifndef RSPSIM_GEOMETRY_HPP
#define RSPSIM_GEOMETRY_HPP

#include <complex>
#include <numbers>

#include "rspsim/errors.hpp"

namespace rsp {

// The fixed optical stage: multi-slit aperture, 2f-2f lens arrangement.
// All lengths in meters.
struct OpticalGeometry {
    double slit_half_width = 0.0;   // a
    double slit_separation = 0.0;   // d, center to center
    double wavelength = 0.0;        // lambda
    double focal_length = 0.0;      // f
    int num_slits = 2;              // 2 (qubit) or odd D >= 3 (qudit)
    double aperture_distance = 0.0; // z_ap, only enters the qudit pump phases

    double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

    // Transverse offset of slit `ordinal` (0..D-1). Qubit: -d/2, +d/2.
    // Qudit: j*d for j = ordinal - (D-1)/2.
    double slit_offset(int ordinal) const;

    void validate() const;
};

// Qubit slit ordinals.
inline constexpr int kSlitLeft = 0;
inline constexpr int kSlitRight = 1;

// Derived propagation parameters for a detection plane z in [f, 2f].
struct PropagationParams {
    double effective_distance = 0.0;  // Z; +inf at z = f, 0 at z = 2f
    double scale_factor = 0.0;        // eta = (z - f)/f
    double phase_parameter = 0.0;     // kappa = k a^2 / 2Z; +inf at z = 2f
    double eta_z = 0.0;               // the product eta*Z = 2f - z, always finite
};

enum class Regime {
    Fraunhofer,
    Fresnel,
    ImagePlane,
};

const char* regime_name(Regime r);

// Fraunhofer holds while kappa <= threshold; for the reference parameters the
// boundary lands at z = 1.8f.
inline constexpr double kKappaFraunhoferDefault = 0.1;
// Half-width of the band around z = 2f treated as the geometric image plane.
inline constexpr double kImagePlaneBand = 0.5e-6;

PropagationParams propagation_params(const OpticalGeometry& geom, double z);

Regime classify_regime(const OpticalGeometry& geom, double z,
                       double kappa_threshold = kKappaFraunhoferDefault);

// Far-field amplitude of one slit, units m^(-1/2):
//   sqrt(k a / (pi eta Z)) exp(i k delta_j x / eta Z) sinc(k a (x + delta_j eta) / eta Z)
std::complex<double> fraunhofer_amplitude(const OpticalGeometry& geom, int slit,
                                          double x, double z);

// Near-field amplitude of one slit, f < z < 2f:
//   sqrt(k / (4 pi a eta Z)) exp(i k delta_j x / eta Z)
//     * int_{-a}^{a} exp(i k s (x + eta delta_j) / eta Z) exp(i k s^2 / 2Z) ds
// Composite Gauss-Legendre panels (count scaled to the phase excursion,
// refined until quad_tol); beyond kFresnelClosedFormPhase the integral is
// evaluated through its exact Fresnel-integral form instead.
std::complex<double> fresnel_amplitude(const OpticalGeometry& geom, int slit,
                                       double x, double z,
                                       double quad_tol = 1e-9);

// Phase excursion above which fresnel_amplitude switches to the closed form.
inline constexpr double kFresnelClosedFormPhase = 2.0;

// z = 2f limit: unit-magnification inverted image, top-hat 1/sqrt(2a) on
// (-delta_j - a, -delta_j + a), phase 0.
std::complex<double> image_plane_amplitude(const OpticalGeometry& geom, int slit,
                                           double x);

// Regime dispatcher for f <= z <= 2f.
std::complex<double> slit_amplitude(const OpticalGeometry& geom, int slit,
                                    double x, double z, double quad_tol = 1e-9);

double sinc(double x);

namespace detail {
// Reference panel-quadrature evaluation of the Fresnel amplitude at any phase
// excursion. fresnel_amplitude delegates here below kFresnelClosedFormPhase;
// tests use it to cross-check the closed form.
std::complex<double> fresnel_amplitude_quadrature(const OpticalGeometry& geom,
                                                  int slit, double x, double z,
                                                  double quad_tol = 1e-9);
}  // namespace detail

}  // namespace rsp

#endif
