#include "rspsim/quadrature.hpp"

#include <numbers>

namespace rsp::quad {

namespace {

constexpr double kPi = std::numbers::pi;

// Power series, reliable for |t| <= 1.6 (phase pi t^2 / 2 <= 4).
std::complex<double> fresnel_series(double t) {
    const double x2 = t * t;
    const double w = 0.5 * kPi * x2;  // pi t^2 / 2
    const double w2 = w * w;

    // C(t) = t * sum_n (-1)^n w^{2n} / ((2n)! (4n+1))
    double c = 0.0;
    double term = 1.0;
    for (int n = 0;; ++n) {
        c += term / (4 * n + 1);
        term *= -w2 / ((2 * n + 1) * (2 * n + 2));
        if (std::abs(term) < 1e-18) break;
    }
    // S(t) = t * sum_n (-1)^n w^{2n+1} / ((2n+1)! (4n+3))
    double s = 0.0;
    term = w;
    for (int n = 0;; ++n) {
        s += term / (4 * n + 3);
        term *= -w2 / ((2 * n + 2) * (2 * n + 3));
        if (std::abs(term) < 1e-18) break;
    }
    return {t * c, t * s};
}

// Auxiliary asymptotic series, valid for t >= 4:
//   C = 1/2 + f sin(w) - g cos(w),  S = 1/2 - f cos(w) - g sin(w),
// with w = pi t^2 / 2. Truncated at the smallest term.
std::complex<double> fresnel_asymptotic(double t) {
    const double w = 0.5 * kPi * t * t;
    const double inv = 1.0 / (kPi * t * t);  // 1 / (pi t^2)
    const double inv2 = inv * inv;

    double f = 0.0;
    double term = 1.0;
    for (int m = 0; m < 16; ++m) {
        f += term;
        const double next = -term * (4 * m + 1) * (4 * m + 3) * inv2;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        if (std::abs(term) < 1e-18) { f += term; break; }
    }
    f /= kPi * t;

    double g = 0.0;
    term = 1.0;
    for (int m = 0; m < 16; ++m) {
        g += term;
        const double next = -term * (4 * m + 3) * (4 * m + 5) * inv2;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        if (std::abs(term) < 1e-18) { g += term; break; }
    }
    g *= inv / (kPi * t);

    const double sw = std::sin(w);
    const double cw = std::cos(w);
    return {0.5 + f * sw - g * cw, 0.5 - f * cw - g * sw};
}

}  // namespace

std::complex<double> fresnel_cs(double t) {
    const double at = std::abs(t);
    std::complex<double> v;
    if (at <= 1.6) {
        v = fresnel_series(at);
    } else if (at < 4.0) {
        // Mid range: direct panel quadrature of exp(i pi u^2 / 2). The phase
        // stays below 8 pi here, so a fixed panel budget is ample.
        v = fresnel_series(1.6) +
            gauss_legendre(
                [](double u) {
                    const double w = 0.5 * kPi * u * u;
                    return std::complex<double>(std::cos(w), std::sin(w));
                },
                1.6, at, 24);
    } else {
        v = fresnel_asymptotic(at);
    }
    return t < 0.0 ? -v : v;
}

std::complex<double> quadratic_phase_integral(double p, double q, double a) {
    if (!(a > 0.0)) return {0.0, 0.0};
    if (q * a * a < 1e-14) {
        // Quadratic phase negligible across the slit: plain sinc.
        const double u = p * a;
        const double sinc = std::abs(u) < 1e-8 ? 1.0 - u * u / 6.0 : std::sin(u) / u;
        return {2.0 * a * sinc, 0.0};
    }
    // Complete the square: p s + q s^2 = q (s + p/2q)^2 - p^2/4q.
    const double shift = 0.5 * p / q;
    const double scale = std::sqrt(2.0 * q / kPi);
    const std::complex<double> diff =
        fresnel_cs(scale * (a + shift)) - fresnel_cs(scale * (-a + shift));
    const double w = -0.25 * p * p / q;
    const std::complex<double> chirp(std::cos(w), std::sin(w));
    return std::sqrt(0.5 * kPi / q) * chirp * diff;
}

}  // namespace rsp::quad
