#include "rspsim/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rsp {

namespace {
constexpr double kPi = std::numbers::pi;

void require_same_dim(int a, int b) {
    if (a != b)
        throw domain_error("dimension mismatch: " + std::to_string(a) + " vs " +
                           std::to_string(b));
}
}  // namespace

double PureKet::norm_sq() const {
    double s = 0.0;
    for (const cplx& c : amp) s += std::norm(c);
    return s;
}

double PureKet::norm() const { return std::sqrt(norm_sq()); }

PureKet& PureKet::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw domain_error("cannot normalize a zero ket");
    for (cplx& c : amp) c /= n;
    for (const cplx& c : amp) {
        if (std::abs(c) > 1e-15) {
            const cplx phase = c / std::abs(c);
            for (cplx& d : amp) d /= phase;
            break;
        }
    }
    return *this;
}

PureKet PureKet::normalized() const {
    PureKet copy = *this;
    copy.normalize();
    return copy;
}

cplx PureKet::inner(const PureKet& other) const {
    require_same_dim(dim(), other.dim());
    cplx s = 0.0;
    for (int i = 0; i < dim(); ++i) s += std::conj(amp[i]) * other.amp[i];
    return s;
}

double DensityOperator::trace_real() const {
    double t = 0.0;
    for (int i = 0; i < dim; ++i) t += at(i, i).real();
    return t;
}

DensityOperator DensityOperator::from_ket(const PureKet& psi) {
    DensityOperator rho(psi.dim());
    for (int r = 0; r < rho.dim; ++r)
        for (int c = 0; c < rho.dim; ++c)
            rho.at(r, c) = psi.amp[r] * std::conj(psi.amp[c]);
    return rho;
}

void DensityOperator::validate() const {
    for (int r = 0; r < dim; ++r)
        for (int c = r; c < dim; ++c)
            if (std::abs(at(r, c) - std::conj(at(c, r))) > 1e-12)
                throw domain_error("density matrix is not Hermitian");
    if (std::abs(trace_real() - 1.0) > 1e-12)
        throw domain_error("density matrix trace differs from 1");
    const std::vector<double> eig = hermitian_eigenvalues(*this);
    if (!eig.empty() && eig.front() < -1e-10)
        throw domain_error("density matrix has a negative eigenvalue: " +
                           std::to_string(eig.front()));
}

double fidelity(const PureKet& target, const DensityOperator& rho) {
    require_same_dim(target.dim(), rho.dim);
    cplx acc = 0.0;
    for (int r = 0; r < rho.dim; ++r)
        for (int c = 0; c < rho.dim; ++c)
            acc += std::conj(target.amp[r]) * rho.at(r, c) * target.amp[c];
    return std::clamp(acc.real(), 0.0, 1.0);
}

double purity(const DensityOperator& rho) {
    cplx acc = 0.0;
    for (int r = 0; r < rho.dim; ++r)
        for (int c = 0; c < rho.dim; ++c)
            acc += rho.at(r, c) * rho.at(c, r);
    return acc.real();
}

PureKet bloch_to_ket(const BlochPoint& b) {
    return PureKet(std::cos(0.5 * b.theta),
                   std::polar(std::sin(0.5 * b.theta), b.phi));
}

BlochPoint ket_to_bloch(const PureKet& psi) {
    if (psi.dim() != 2) throw domain_error("Bloch coordinates are defined for qubits");
    if (std::abs(psi.norm_sq() - 1.0) > 1e-9)
        throw domain_error("ket must be normalized for Bloch coordinates");
    const double al = std::abs(psi.amp[0]);
    const double ar = std::abs(psi.amp[1]);
    BlochPoint b;
    b.theta = 2.0 * std::atan2(ar, al);
    if (al < 1e-15 || ar < 1e-15) {
        b.phi = 0.0;  // pole convention
    } else {
        b.phi = std::arg(psi.amp[1] * std::conj(psi.amp[0]));
        if (b.phi >= kPi) b.phi = -kPi;  // keep [-pi, pi)
    }
    return b;
}

double bloch_angle(const PureKet& a, const PureKet& b) {
    const double ov = std::clamp(std::abs(a.normalized().inner(b.normalized())), 0.0, 1.0);
    return 2.0 * std::acos(ov);
}

std::vector<double> hermitian_eigenvalues(const DensityOperator& rho) {
    const int n = rho.dim;
    std::vector<cplx> a = rho.m;
    auto el = [&](int r, int c) -> cplx& { return a[static_cast<size_t>(r) * n + c]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(el(p, q));
        if (off < 1e-28) break;

        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = el(p, q);
                if (std::abs(apq) < 1e-300) continue;
                // Phase out a_pq, then a real 2x2 rotation annihilates it.
                const double app = el(p, p).real();
                const double aqq = el(q, q).real();
                const cplx phase = apq / std::abs(apq);
                const double theta = 0.5 * std::atan2(2.0 * std::abs(apq), app - aqq);
                const double c = std::cos(theta);
                const cplx s = std::sin(theta) * phase;
                for (int i = 0; i < n; ++i) {
                    const cplx aip = el(i, p);
                    const cplx aiq = el(i, q);
                    el(i, p) = c * aip + std::conj(s) * aiq;
                    el(i, q) = -s * aip + c * aiq;
                }
                for (int i = 0; i < n; ++i) {
                    const cplx api = el(p, i);
                    const cplx aqi = el(q, i);
                    el(p, i) = c * api + s * aqi;
                    el(q, i) = -std::conj(s) * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = el(i, i).real();
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace rsp
