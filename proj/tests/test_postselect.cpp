#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "rspsim/postselect.hpp"
#include "rspsim/rng.hpp"

using namespace rsp;
using oracles::reference_geometry;

namespace {
constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// random window, mostly far-field with some Fresnel and image-plane cases
DetectorWindow random_window(DetRng& rng, const OpticalGeometry& g) {
    const double f = g.focal_length;
    DetectorWindow w;
    const double pick = rng.uniform();
    if (pick < 0.70) w.plane_z = f + rng.uniform() * 0.8 * f;
    else if (pick < 0.92) w.plane_z = 1.8 * f + rng.uniform() * 0.17 * f;
    else w.plane_z = 2.0 * f;
    w.center_x = rng.uniform(-1.5e-3, 1.5e-3);
    w.width = rng.uniform(1e-6, 60e-6);
    return w;
}
}  // namespace

TEST_CASE("point postselection ket") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;

    SUBCASE("pattern center is |l> + |r>") {
        const PureKet phi = point_postselect_ket(g, 0.0, f);
        CHECK(std::abs(phi.amp[0] - phi.amp[1]) < 1e-12 * std::abs(phi.amp[0]));
    }
    SUBCASE("half interference period gives |l> - |r>") {
        const double x = 0.5 * g.wavelength * f / g.slit_separation;  // pi f / k d
        CHECK(x == doctest::Approx(402e-6).epsilon(1e-3));
        const PureKet phi = point_postselect_ket(g, x, f);
        CHECK(std::abs(phi.amp[0] + phi.amp[1]) < 1e-9 * std::abs(phi.amp[0]));
    }
    SUBCASE("image plane projects on single slits") {
        const PureKet phi = point_postselect_ket(g, -0.5 * g.slit_separation, 2.0 * f);
        CHECK(std::abs(phi.amp[kSlitLeft]) == 0.0);
        CHECK(std::abs(phi.amp[kSlitRight]) > 0.0);
    }
}

TEST_CASE("remote point target") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;

    SUBCASE("swap-symmetric point") {
        const PureKet t = remote_target_point(g, 0.0, f);
        CHECK(t.amp[0].real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
        CHECK(t.amp[1].real() == doctest::Approx(kInvSqrt2).epsilon(1e-12));
    }
    SUBCASE("image of the right slit prepares |l>") {
        const PureKet t = remote_target_point(g, -0.5 * g.slit_separation, 2.0 * f);
        CHECK(std::abs(t.amp[0]) == doctest::Approx(1.0));
        CHECK(std::abs(t.amp[1]) == doctest::Approx(0.0));
    }
    SUBCASE("focal scan traces the full equator") {
        const double half_period = 0.5 * g.wavelength * f / g.slit_separation;
        double phi_min = kPi, phi_max = -kPi;
        for (int i = 0; i < 200; ++i) {
            const double x = -half_period + (i + 0.5) * half_period / 100.0;
            const BlochPoint b = ket_to_bloch(remote_target_point(g, x, f));
            CHECK(b.theta == doctest::Approx(0.5 * kPi).epsilon(1e-9));
            phi_min = std::min(phi_min, b.phi);
            phi_max = std::max(phi_max, b.phi);
        }
        CHECK(phi_min < -3.1);
        CHECK(phi_max > 3.1);
    }
    SUBCASE("diffraction zero is degenerate") {
        const double x0 = g.wavelength * f / (2.0 * g.slit_half_width);
        CHECK_THROWS_AS(remote_target_point(g, x0, f), degenerate_point_error);
        CHECK(!try_remote_target_point(g, x0, f));
    }
}

TEST_CASE("overlap matrix limits") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;

    SUBCASE("point limit Phi_ij -> phi_i phi_j* dx") {
        const double dx = 1e-9;
        for (double x : {0.0, 0.2e-3}) {
            const OverlapMatrix m = overlap_matrix(g, {x, dx, f});
            const PureKet phi = point_postselect_ket(g, x, f);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const cplx expect = phi.amp[i] * std::conj(phi.amp[j]) * dx;
                    CHECK(std::abs(m.at(i, j) - expect) < 1e-6 * std::abs(expect));
                }
        }
    }
    SUBCASE("wide-detector limit kills the coherences") {
        // 20 half-zones: the delta_ij structure emerges, but the slow sinc^2
        // tails keep the diagonal ~1e-2 below one at this width.
        const double wide = 20.0 * g.wavelength * f / (2.0 * g.slit_half_width);
        const OverlapMatrix m = overlap_matrix(g, {0.0, wide, f});
        CHECK(std::abs(m.at(0, 1)) < 1e-3);
        CHECK(m.at(0, 0).real() == doctest::Approx(1.0).epsilon(2e-2));
        CHECK(m.at(1, 1).real() == doctest::Approx(1.0).epsilon(2e-2));

        // 200 half-zones reach the limit to 1e-3
        const OverlapMatrix m2 = overlap_matrix(g, {0.0, 10.0 * wide, f});
        CHECK(m2.at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(m2.at(1, 1).real() == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(std::abs(m2.at(0, 1)) < 1e-3);
    }
    SUBCASE("hermiticity and Cauchy-Schwarz on random windows") {
        DetRng rng(5150);
        for (int trial = 0; trial < 100; ++trial) {
            const DetectorWindow w = random_window(rng, g);
            const OverlapMatrix m = overlap_matrix(g, w);
            CHECK(std::abs(m.at(0, 1) - std::conj(m.at(1, 0))) == 0.0);
            CHECK(m.at(0, 0).real() >= 0.0);
            CHECK(m.at(1, 1).real() >= 0.0);
            CHECK(m.at(0, 0).real() <= 1.0 + 1e-9);
            CHECK(m.at(1, 1).real() <= 1.0 + 1e-9);
            CHECK(std::norm(m.at(0, 1)) <=
                  m.at(0, 0).real() * m.at(1, 1).real() * (1.0 + 1e-9) + 1e-30);
        }
    }
}

TEST_CASE("remotely prepared finite-resolution state") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;

    SUBCASE("bucket detector leaves the maximally mixed state") {
        const double bucket = 20.0 * g.wavelength * f / g.slit_half_width;
        const DensityOperator rho = remote_state_finite(g, {0.0, bucket, f});
        CHECK_NOTHROW(rho.validate());
        CHECK(rho.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(rho.at(1, 1).real() == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(std::abs(rho.at(0, 1)) < 1e-3);
    }
    SUBCASE("near-point window at the pattern center") {
        const DensityOperator rho = remote_state_finite(g, {0.0, 1e-9, f});
        const PureKet plus(kInvSqrt2, kInvSqrt2);
        CHECK(fidelity(plus, rho) >= 1.0 - 1e-6);
    }
    SUBCASE("single-slit image window is exactly pure") {
        const DensityOperator rho =
            remote_state_finite(g, {0.5 * g.slit_separation, 20e-6, 2.0 * f});
        // window inside the left slit's image -> Bob holds |r>
        CHECK(rho.at(1, 1).real() == doctest::Approx(1.0));
        CHECK(purity(rho) == doctest::Approx(1.0));
        CHECK(prep_purity(g, {0.5 * g.slit_separation, 20e-6, 2.0 * f}) ==
              doctest::Approx(1.0));
    }
    SUBCASE("dead zone between the images is degenerate") {
        CHECK_THROWS_AS(remote_state_finite(g, {0.0, 20e-6, 2.0 * f}),
                        degenerate_window_error);
    }
}

TEST_CASE("preparation probability") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;

    SUBCASE("zero-width window never fires") {
        CHECK(prep_probability(g, {0.3e-3, 0.0, f}) == 0.0);
    }
    SUBCASE("small window at the pattern center") {
        const double dx = 20e-6;
        const double expect = 2.0 * g.slit_half_width / (g.wavelength * f) * dx;
        CHECK(expect == doctest::Approx(7.96e-3).epsilon(1e-3));
        CHECK(prep_probability(g, {0.0, dx, f}) == doctest::Approx(expect).epsilon(0.01));
    }
    SUBCASE("bucket detector always fires (up to envelope tails)") {
        const double bucket = 20.0 * g.wavelength * f / g.slit_half_width;
        CHECK(prep_probability(g, {0.0, bucket, f}) == doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("closed-form figures equal the compositional path") {
    const OpticalGeometry g = reference_geometry();
    DetRng rng(61033);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const DetectorWindow w = random_window(rng, g);
        std::optional<PureKet> target;
        try {
            target = try_remote_target_point(g, w.center_x, w.plane_z);
        } catch (const domain_error&) {
            continue;
        }
        if (!target) continue;
        DensityOperator rho;
        try {
            rho = remote_state_finite(g, w);
        } catch (const degenerate_window_error&) {
            continue;
        }
        const double f_closed = prep_fidelity(g, w);
        const double f_comp = fidelity(*target, rho);
        CHECK(std::abs(f_closed - f_comp) < 1e-10);
        const double p_closed = prep_purity(g, w);
        const double p_comp = purity(rho);
        CHECK(std::abs(p_closed - p_comp) < 1e-10);
        ++checked;
    }
    CHECK(checked > 800);
}

TEST_CASE("fidelity and purity limits") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;

    SUBCASE("point limit") {
        CHECK(prep_fidelity(g, {0.0, 1e-9, f}) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(prep_purity(g, {0.0, 1e-9, f}) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(prep_fidelity(g, {0.0, 0.0, f}) == 1.0);
        CHECK(prep_purity(g, {0.0, 0.0, f}) == 1.0);
    }
    SUBCASE("bucket limit") {
        const double bucket = 20.0 * g.wavelength * f / g.slit_half_width;
        CHECK(prep_fidelity(g, {0.0, bucket, f}) == doctest::Approx(0.5).epsilon(2e-3));
        CHECK(prep_purity(g, {0.0, bucket, f}) == doctest::Approx(0.5).epsilon(2e-3));
    }
    SUBCASE("purity degrades monotonically with the window width") {
        const double max_w = 0.5 * g.wavelength * f / g.slit_separation;
        double prev = 1.0;
        for (int i = 1; i <= 20; ++i) {
            const double pur = prep_purity(g, {0.0, i * max_w / 20.0, f});
            CHECK(pur <= prev + 1e-12);
            prev = pur;
        }
    }
    SUBCASE("same state, different plane, different probability") {
        const double dx = 20e-6;
        const double p1 = prep_probability(g, {0.0, dx, f});
        const double p2 = prep_probability(g, {0.0, dx, 1.5 * f});
        CHECK(std::abs(p1 - p2) > 1e-4);
        // both placements prepare |l> + |r>
        CHECK(bloch_angle(remote_target_point(g, 0.0, f),
                          remote_target_point(g, 0.0, 1.5 * f)) < 1e-9);
    }
}

TEST_CASE("target inversion on a grid") {
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;
    const double dx = 20e-6;

    SUBCASE("|l> + |r> is reachable at x = 0 in every plane short of the image") {
        const PureKet plus(kInvSqrt2, kInvSqrt2);
        const std::vector<double> zs = {f, 1.2 * f, 1.5 * f, 1.7 * f, 1.9 * f};
        const std::vector<double> xs = {-40e-6, -20e-6, 0.0, 20e-6, 40e-6};
        const auto cands = invert_target(g, plus, zs, xs, dx);
        REQUIRE(!cands.empty());
        int at_zero = 0;
        for (const auto& c : cands)
            if (c.x == 0.0) ++at_zero;
        CHECK(at_zero == static_cast<int>(zs.size()));
        // sorted by probability
        for (size_t i = 1; i < cands.size(); ++i)
            CHECK(cands[i - 1].probability >= cands[i].probability);
    }
    SUBCASE("pole target lives near the conjugate slit image") {
        const PureKet left(1.0, 0.0);
        std::vector<double> zs = {1.98 * f, 1.99 * f, 2.0 * f};
        std::vector<double> xs;
        for (int i = -30; i <= 30; ++i) xs.push_back(i * 10e-6);
        const auto cands = invert_target(g, left, zs, xs, dx);
        REQUIRE(!cands.empty());
        // Bob's |l> comes from detecting the right slit's inverted image
        CHECK(cands.front().x < -0.5 * g.slit_separation + g.slit_half_width + 1e-9);
        CHECK(cands.front().x > -0.5 * g.slit_separation - g.slit_half_width - 1e-9);
    }
    SUBCASE("equator quarter point sits a quarter period out") {
        const PureKet target(kInvSqrt2, cplx(0.0, kInvSqrt2));  // phi = pi/2
        const double quarter = 0.25 * g.wavelength * f / g.slit_separation;
        std::vector<double> xs;
        for (int i = 0; i <= 100; ++i) xs.push_back(i * quarter / 25.0);
        const auto cands = invert_target(g, target, {f}, xs, dx, 1e-2);
        REQUIRE(!cands.empty());
        CHECK(cands.front().x == doctest::Approx(quarter).epsilon(0.05));
    }
    SUBCASE("empty result is allowed") {
        const PureKet target(0.9, cplx(0.0, std::sqrt(1.0 - 0.81)));
        const auto cands = invert_target(g, target, {f}, {0.0}, dx);
        CHECK(cands.empty());
    }
}
