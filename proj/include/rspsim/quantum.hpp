#ifndef RSPSIM_QUANTUM_HPP
#define RSPSIM_QUANTUM_HPP

#include <complex>
#include <vector>

#include "rspsim/errors.hpp"

namespace rsp {

using cplx = std::complex<double>;

// Pure state of a D-level system. Amplitudes are stored by slit ordinal;
// for qubits amplitude(0) = alpha (|l>), amplitude(1) = beta (|r>).
struct PureKet {
    std::vector<cplx> amp;

    PureKet() = default;
    explicit PureKet(int dim) : amp(dim) {}
    PureKet(cplx alpha, cplx beta) : amp{alpha, beta} {}

    int dim() const { return static_cast<int>(amp.size()); }
    double norm_sq() const;
    double norm() const;

    // Scales to unit norm and fixes the global phase so the first
    // non-negligible amplitude is real non-negative.
    PureKet& normalize();
    PureKet normalized() const;

    cplx inner(const PureKet& other) const;  // <this|other>
};

// Density operator, row-major D x D.
struct DensityOperator {
    int dim = 0;
    std::vector<cplx> m;

    DensityOperator() = default;
    explicit DensityOperator(int d) : dim(d), m(static_cast<size_t>(d) * d) {}

    cplx& at(int r, int c) { return m[static_cast<size_t>(r) * dim + c]; }
    const cplx& at(int r, int c) const { return m[static_cast<size_t>(r) * dim + c]; }

    double trace_real() const;

    static DensityOperator from_ket(const PureKet& psi);

    // Hermiticity within 1e-12, unit trace within 1e-12, eigenvalues >= -1e-10
    // (smaller negative quadrature artifacts are tolerated, larger ones throw).
    void validate() const;
};

struct BlochPoint {
    double theta = 0.0;  // [0, pi]
    double phi = 0.0;    // [-pi, pi)
};

// Figures of merit of one preparation.
struct FigureTriple {
    double probability = 0.0;
    double fidelity = 0.0;
    double purity = 0.0;
};

// F = <psi|rho|psi>, clamped to [0, 1].
double fidelity(const PureKet& target, const DensityOperator& rho);

// Tr(rho^2).
double purity(const DensityOperator& rho);

// cos(theta/2)|l> + e^{i phi} sin(theta/2)|r>.
PureKet bloch_to_ket(const BlochPoint& b);

// Inverse of bloch_to_ket; phi := 0 at the poles.
BlochPoint ket_to_bloch(const PureKet& psi);

// Great-circle angle between two pure qubit states: 2 acos |<a|b>|.
double bloch_angle(const PureKet& a, const PureKet& b);

// Eigenvalues of a Hermitian matrix (ascending), cyclic Jacobi sweeps.
std::vector<double> hermitian_eigenvalues(const DensityOperator& rho);

}  // namespace rsp

#endif
