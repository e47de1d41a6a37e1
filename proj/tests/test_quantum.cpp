#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rspsim/quantum.hpp"
#include "rspsim/rng.hpp"

using namespace rsp;

namespace {
constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
}

TEST_CASE("ket normalization fixes norm and global phase") {
    PureKet psi(cplx(0.0, 2.0), cplx(0.0, 2.0));
    psi.normalize();
    CHECK(psi.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(psi.amp[0].real() == doctest::Approx(kInvSqrt2));
    CHECK(psi.amp[0].imag() == doctest::Approx(0.0));

    PureKet zero(cplx(0.0, 0.0), cplx(0.0, 0.0));
    CHECK_THROWS_AS(zero.normalize(), domain_error);
}

TEST_CASE("fidelity basics") {
    const PureKet psi = PureKet(cplx(0.6, 0.0), cplx(0.0, 0.8)).normalized();
    const DensityOperator pure = DensityOperator::from_ket(psi);
    CHECK(fidelity(psi, pure) == doctest::Approx(1.0).epsilon(1e-12));

    DensityOperator mixed(2);
    mixed.at(0, 0) = 0.5;
    mixed.at(1, 1) = 0.5;
    CHECK(fidelity(PureKet(1.0, 0.0), mixed) == doctest::Approx(0.5));

    const DensityOperator right = DensityOperator::from_ket(PureKet(0.0, 1.0));
    CHECK(fidelity(PureKet(1.0, 0.0), right) == doctest::Approx(0.0));

    PureKet qutrit(3);
    CHECK_THROWS_AS(fidelity(qutrit, mixed), domain_error);
}

TEST_CASE("purity basics") {
    const PureKet psi = PureKet(cplx(0.3, 0.4), cplx(0.5, -0.2)).normalized();
    CHECK(purity(DensityOperator::from_ket(psi)) == doctest::Approx(1.0).epsilon(1e-12));

    DensityOperator mixed2(2);
    mixed2.at(0, 0) = 0.5;
    mixed2.at(1, 1) = 0.5;
    CHECK(purity(mixed2) == doctest::Approx(0.5));

    DensityOperator mixed3(3);
    for (int i = 0; i < 3; ++i) mixed3.at(i, i) = 1.0 / 3.0;
    CHECK(purity(mixed3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("two-path identities for the functionals") {
    DetRng rng(902);
    for (int trial = 0; trial < 50; ++trial) {
        // random mixed qubit state from two random kets
        const PureKet a = rng.random_ket(2);
        const PureKet b = rng.random_ket(2);
        const double w = rng.uniform();
        DensityOperator rho(2);
        const DensityOperator ra = DensityOperator::from_ket(a);
        const DensityOperator rb = DensityOperator::from_ket(b);
        for (size_t i = 0; i < rho.m.size(); ++i)
            rho.m[i] = w * ra.m[i] + (1.0 - w) * rb.m[i];

        const PureKet t = rng.random_ket(2);
        // F = Tr(rho |t><t|)
        const DensityOperator proj = DensityOperator::from_ket(t);
        cplx tr = 0.0;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) tr += rho.at(r, c) * proj.at(c, r);
        CHECK(fidelity(t, rho) == doctest::Approx(tr.real()).epsilon(1e-12));

        // purity = sum |rho_ij|^2 for Hermitian rho
        double entrywise = 0.0;
        for (const cplx& v : rho.m) entrywise += std::norm(v);
        CHECK(purity(rho) == doctest::Approx(entrywise).epsilon(1e-12));
        CHECK(purity(rho) >= 0.5 - 1e-12);
        CHECK(purity(rho) <= 1.0 + 1e-12);
    }
}

TEST_CASE("bloch mapping") {
    SUBCASE("poles and equator") {
        const PureKet north = bloch_to_ket({0.0, 1.234});
        CHECK(std::abs(north.amp[0]) == doctest::Approx(1.0));
        CHECK(std::abs(north.amp[1]) == doctest::Approx(0.0));

        const PureKet eq = bloch_to_ket({0.5 * kPi, 0.0});
        CHECK(eq.amp[0].real() == doctest::Approx(kInvSqrt2));
        CHECK(eq.amp[1].real() == doctest::Approx(kInvSqrt2));

        const BlochPoint back = ket_to_bloch(north.normalized());
        CHECK(back.theta == doctest::Approx(0.0));
        CHECK(back.phi == doctest::Approx(0.0));  // pole convention
    }
    SUBCASE("round trip on seeded points") {
        DetRng rng(7781);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            BlochPoint b;
            b.theta = std::acos(1.0 - 2.0 * rng.uniform());
            b.phi = rng.uniform(-kPi, std::nextafter(kPi, 0.0));
            const BlochPoint back = ket_to_bloch(bloch_to_ket(b).normalized());
            worst = std::max(worst, std::abs(back.theta - b.theta));
            double dphi = std::abs(back.phi - b.phi);
            dphi = std::min(dphi, 2.0 * kPi - dphi);
            if (b.theta > 1e-6 && b.theta < kPi - 1e-6)
                worst = std::max(worst, dphi);
        }
        CHECK(worst < 1e-10);
    }
    SUBCASE("qubit only") {
        PureKet qutrit(3);
        qutrit.amp[0] = 1.0;
        CHECK_THROWS_AS(ket_to_bloch(qutrit), domain_error);
    }
}

TEST_CASE("density operator validation") {
    DensityOperator rho(2);
    rho.at(0, 0) = 0.75;
    rho.at(1, 1) = 0.25;
    rho.at(0, 1) = cplx(0.1, 0.2);
    rho.at(1, 0) = std::conj(rho.at(0, 1));
    CHECK_NOTHROW(rho.validate());

    SUBCASE("eigenvalue artifacts within tolerance pass") {
        // borderline: smallest eigenvalue ~ -5e-11
        DensityOperator r(2);
        const double c = 0.5 + 2.5e-11;
        r.at(0, 0) = 0.5;
        r.at(1, 1) = 0.5;
        r.at(0, 1) = c;
        r.at(1, 0) = c;
        CHECK_NOTHROW(r.validate());
    }
    SUBCASE("genuinely negative eigenvalues fail") {
        DensityOperator r(2);
        r.at(0, 0) = 0.5;
        r.at(1, 1) = 0.5;
        r.at(0, 1) = 0.6;
        r.at(1, 0) = 0.6;
        CHECK_THROWS_AS(r.validate(), domain_error);
    }
    SUBCASE("non-hermitian fails") {
        DensityOperator r(2);
        r.at(0, 0) = 0.5;
        r.at(1, 1) = 0.5;
        r.at(0, 1) = cplx(0.1, 0.1);
        r.at(1, 0) = cplx(0.1, 0.1);
        CHECK_THROWS_AS(r.validate(), domain_error);
    }
}

TEST_CASE("hermitian eigenvalues") {
    DetRng rng(40212);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 2 + 3 * (trial % 2);  // 2 and 5
        // random Hermitian with known spectrum: sum_k lambda_k |v_k><v_k|
        // built from successive Gram-Schmidt-orthonormalized random kets
        std::vector<PureKet> basis;
        while (static_cast<int>(basis.size()) < d) {
            PureKet v = rng.random_ket(d);
            for (const PureKet& u : basis) {
                const cplx ov = u.inner(v);
                for (int i = 0; i < d; ++i) v.amp[i] -= ov * u.amp[i];
            }
            if (v.norm() > 1e-6) basis.push_back(v.normalized());
        }
        std::vector<double> spectrum(d);
        double sum = 0.0;
        for (double& s : spectrum) {
            s = rng.uniform();
            sum += s;
        }
        for (double& s : spectrum) s /= sum;
        std::sort(spectrum.begin(), spectrum.end());

        DensityOperator rho(d);
        for (int k = 0; k < d; ++k)
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c)
                    rho.at(r, c) +=
                        spectrum[k] * basis[k].amp[r] * std::conj(basis[k].amp[c]);

        const std::vector<double> eig = hermitian_eigenvalues(rho);
        REQUIRE(eig.size() == static_cast<size_t>(d));
        for (int k = 0; k < d; ++k)
            CHECK(eig[k] == doctest::Approx(spectrum[k]).epsilon(1e-9));
    }
}
