#ifndef RSPSIM_QUADRATURE_HPP
#define RSPSIM_QUADRATURE_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "rspsim/errors.hpp"

namespace rsp::quad {

// 8-point Gauss-Legendre rule on [-1, 1] (positive half; nodes are symmetric).
inline constexpr std::array<double, 4> kGl8Nodes = {
    0.18343464249564980494,
    0.52553240991632898582,
    0.79666647741362673959,
    0.96028985649753623168,
};
inline constexpr std::array<double, 4> kGl8Weights = {
    0.36268378337836198297,
    0.31370664587788728734,
    0.22238103445337447054,
    0.10122853629037625915,
};

// Composite 8-point Gauss-Legendre over [a, b] with `panels` equal panels.
template <typename F>
auto gauss_legendre(F&& f, double a, double b, int panels)
    -> decltype(f(0.0)) {
    using value_type = decltype(f(0.0));
    const double h = (b - a) / panels;
    value_type total{};
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        value_type acc{};
        for (int n = 0; n < 4; ++n) {
            const double dx = half * kGl8Nodes[n];
            acc += kGl8Weights[n] * (f(mid - dx) + f(mid + dx));
        }
        total += half * acc;
    }
    return total;
}

template <typename T>
struct refined_result {
    T value{};
    double rel_error = 0.0;  // achieved |I_2N - I_N| / scale
    int panels = 0;
};

// Panel-doubling (Richardson-style) refinement: accept once two successive
// panel counts agree to rel_tol relative to `scale` (or to |value| when
// scale <= 0). Throws numeric_error after max_doublings.
template <typename F>
auto integrate_refined(F&& f, double a, double b, int base_panels,
                       double rel_tol, double scale = 0.0,
                       int max_doublings = 12)
    -> refined_result<decltype(f(0.0))> {
    using value_type = decltype(f(0.0));
    int n = base_panels < 1 ? 1 : base_panels;
    value_type coarse = gauss_legendre(f, a, b, n);
    for (int i = 0; i < max_doublings; ++i) {
        n *= 2;
        value_type fine = gauss_legendre(f, a, b, n);
        const double ref = scale > 0.0 ? scale : std::abs(fine);
        const double err = std::abs(fine - coarse);
        if (err <= rel_tol * (ref > 0.0 ? ref : 1.0)) {
            return {fine, ref > 0.0 ? err / ref : err, n};
        }
        coarse = fine;
    }
    const double ref = scale > 0.0 ? scale : std::abs(coarse);
    throw numeric_error("quadrature did not converge to requested tolerance",
                        ref > 0.0 ? std::abs(coarse) / ref : 0.0);
}

// Fresnel integrals, C(t) + i S(t) with the pi/2 t^2 convention:
//   C(t) = int_0^t cos(pi u^2 / 2) du,  S(t) = int_0^t sin(pi u^2 / 2) du.
std::complex<double> fresnel_cs(double t);

// int_{-a}^{a} exp(i (p s + q s^2)) ds for q > 0, evaluated exactly through
// the Fresnel integrals. Accurate to ~1e-10 absolute for any phase excursion.
std::complex<double> quadratic_phase_integral(double p, double q, double a);

}  // namespace rsp::quad

#endif
