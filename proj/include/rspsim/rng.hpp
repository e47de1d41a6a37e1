#ifndef RSPSIM_RNG_HPP
#define RSPSIM_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "rspsim/quantum.hpp"

namespace rsp {

// Deterministic random source: mt19937_64 with explicit uniform/gaussian
// mappings, so sequences do not depend on the standard library's
// distribution implementations.
class DetRng {
  public:
    explicit DetRng(std::uint64_t seed) : eng_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {  // Box-Muller
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    // Haar-like random pure state of dimension d.
    PureKet random_ket(int d) {
        PureKet psi(d);
        for (auto& a : psi.amp) a = cplx(gaussian(), gaussian());
        return psi.normalize();
    }

  private:
    std::mt19937_64 eng_;
};

}  // namespace rsp

#endif
