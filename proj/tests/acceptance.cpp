// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured values and its wall time.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rspsim/postselect.hpp"
#include "rspsim/povm.hpp"
#include "rspsim/qudit.hpp"
#include "rspsim/recipes.hpp"
#include "rspsim/rng.hpp"
#include "rspsim/sweep.hpp"

using namespace rsp;
using oracles::reference_geometry;

namespace {
constexpr double kPi = std::numbers::pi;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void report(int criterion, bool ok, const std::string& detail, double seconds) {
    std::printf("[%s] criterion %d: %s [%.1f s]\n", ok ? "PASS" : "FAIL", criterion,
                detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof buf, pattern, args);
    va_end(args);
    return buf;
}

SweepConfig coarse_config(Maximize m) {
    SweepConfig cfg;
    cfg.z_step = 100e-6;
    cfg.maximize = m;
    cfg.workers = 4;
    return cfg;
}

// Criteria 6 and 7 run on the coarse preset by default; setting
// RSPSIM_ACCEPT_PRESET=full runs the 3e5-plane long job with the tightened
// tolerances instead.
bool full_preset() {
    const char* env = std::getenv("RSPSIM_ACCEPT_PRESET");
    return env && std::string(env) == "full";
}

// Sweep maps shared between criteria 6, 7 and 10.
const SweepMap& stats_map(Maximize m) {
    static SweepMap max_p = run_postselect_sweep(reference_geometry(), 20e-6, [] {
        SweepConfig c = coarse_config(Maximize::Probability);
        if (full_preset()) c.z_step = 1e-6;
        return c;
    }());
    static SweepMap max_f = run_postselect_sweep(reference_geometry(), 20e-6, [] {
        SweepConfig c = coarse_config(Maximize::Fidelity);
        if (full_preset()) c.z_step = 1e-6;
        return c;
    }());
    return m == Maximize::Probability ? max_p : max_f;
}

// Criterion 10 always runs the coarse preset.
const SweepMap& coarse_determinism_map() {
    static SweepMap map = [] {
        if (!full_preset()) return stats_map(Maximize::Probability);
        return run_postselect_sweep(reference_geometry(), 20e-6,
                                    coarse_config(Maximize::Probability));
    }();
    return map;
}

bool within(double value, double expect, double tol) {
    return std::abs(value - expect) <= tol;
}
}  // namespace

TEST_CASE("criterion 1: normalization and orthogonality") {
    Timer timer;
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;
    DetRng rng(20260808);

    double worst_norm = 0.0;
    double worst_cross = 0.0;
    for (int i = 0; i < 50; ++i) {
        double z;
        if (i % 5 == 4) z = f + (0.8 + 0.16 * rng.uniform()) * f;  // Fresnel zone
        else if (i == 45) z = 2.0 * f;
        else z = f + 0.8 * rng.uniform() * f;  // far field
        const int periods = 12 + 4 * (i % 3);
        const int slit = i % 2;
        const double norm = oracles::norm_integral(g, slit, z, periods);
        const double cross = std::abs(oracles::cross_integral(g, z, periods));
        worst_norm = std::max(worst_norm, std::abs(norm - 1.0));
        worst_cross = std::max(worst_cross, cross);
    }
    const bool ok = worst_norm < 1e-6 && worst_cross < 1e-6;
    CHECK(worst_norm < 1e-6);
    CHECK(worst_cross < 1e-6);
    report(1, ok,
           fmt("norm/orthogonality over 50 samples: max |norm-1| = %.2e, max |cross| = %.2e",
               worst_norm, worst_cross),
           timer.seconds());
}

TEST_CASE("criterion 2: POVM algebra") {
    Timer timer;
    const OpticalGeometry g = reference_geometry();
    DetRng rng(20260809);

    bool complete = true;
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.uniform(0.0, 0.25 * kPi);
        const auto [h, v] = povm_elements(theta);
        complete = complete && h[0].real() + v[0].real() == 1.0 &&
                   h[3].real() + v[3].real() == 1.0 && h[1] == cplx(0.0, 0.0) &&
                   h[2] == cplx(0.0, 0.0);
    }

    const Outcome outcomes[4] = {{1, Port::V}, {2, Port::V}, {1, Port::H}, {2, Port::H}};
    double worst_recovery = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const PureKet target = rng.random_ket(2);
        const PovmSettings s = settings_for_target(target);
        for (const Outcome& o : outcomes) {
            const auto [ket, op] = point_prepared_state(s, o, g);
            const Mat2 m = pauli_matrix(op);
            const PureKet fixed(m[0] * ket.amp[0] + m[1] * ket.amp[1],
                                m[2] * ket.amp[0] + m[3] * ket.amp[1]);
            const double ov = std::abs(fixed.normalized().inner(target.normalized()));
            worst_recovery = std::max(worst_recovery, 1.0 - ov * ov);
        }
    }
    const bool ok = complete && worst_recovery < 1e-12;
    CHECK(complete);
    CHECK(worst_recovery < 1e-12);
    report(2, ok,
           fmt("POVM completeness exact, worst correction infidelity = %.2e over 4000 outcomes",
               worst_recovery),
           timer.seconds());
}

TEST_CASE("criterion 3: generalized-measurement statistics") {
    Timer timer;
    const PovmScanResult scan = run_povm_scan(reference_geometry(), 20e-6, 101, 200);
    const bool ok = within(scan.probability.mean, 0.01547, 0.0005) &&
                    within(scan.probability.min, 0.01521, 0.0005) &&
                    within(scan.probability.max, 0.01559, 0.0005) &&
                    within(scan.fidelity.min, 0.9995, 0.0002) &&
                    within(scan.purity.min, 0.9989, 0.0003);
    CHECK(scan.probability.mean == doctest::Approx(0.01547).epsilon(0.0005 / 0.01547));
    CHECK(within(scan.probability.min, 0.01521, 0.0005));
    CHECK(within(scan.probability.max, 0.01559, 0.0005));
    CHECK(within(scan.fidelity.min, 0.9995, 0.0002));
    CHECK(within(scan.purity.min, 0.9989, 0.0003));
    report(3, ok,
           fmt("<P> = %.5f (0.01547), P in [%.5f, %.5f] ([0.01521, 0.01559]), "
               "F_min = %.5f (0.9995), Pur_min = %.5f (0.9989)",
               scan.probability.mean, scan.probability.min, scan.probability.max,
               scan.fidelity.min, scan.purity.min),
           timer.seconds());
}

TEST_CASE("criterion 4: quadratic closed-form approximations") {
    Timer timer;
    const OpticalGeometry g = reference_geometry();
    const double dx = 20e-6;
    const Outcome outcomes[4] = {{1, Port::V}, {2, Port::V}, {1, Port::H}, {2, Port::H}};

    double worst_f = 0.0;
    double worst_p = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double theta = 0.25 * kPi * i / 99.0;
        const double cs = std::cos(2.0 * theta) * std::sin(2.0 * theta);
        const double f_approx = 1.0 - 0.002 * cs * cs;
        const double p_approx = 1.0 - 0.004 * cs * cs;
        for (int m = 0; m < 25; ++m) {
            const double chi = -kPi + (m + 0.5) * 2.0 * kPi / 25.0;
            const PovmSettings s{theta, chi};
            for (const Outcome& o : outcomes) {
                worst_f = std::max(worst_f,
                                   std::abs(povm_fidelity(s, o, g, dx) - f_approx));
                worst_p = std::max(worst_p,
                                   std::abs(povm_purity(s, o, g, dx) - p_approx));
            }
        }
    }
    const bool ok = worst_f < 1e-4 && worst_p < 1e-4;
    CHECK(worst_f < 1e-4);
    CHECK(worst_p < 1e-4);
    report(4, ok,
           fmt("max |F - F_approx| = %.2e, max |Pur - Pur_approx| = %.2e over "
               "100 x 25 x 4 settings",
               worst_f, worst_p),
           timer.seconds());
}

TEST_CASE("criterion 5: reference-experiment fidelities") {
    Timer timer;
    const OpticalGeometry geom = oracles::taguchi_geometry();
    const double dx = 20e-6;
    const double alphas[6] = {0.979, 0.776, 0.742, 0.670, 0.631, 0.201};
    const double chis[6] = {-0.113, -2.319, -1.159, 1.159, 2.319, 0.113};
    const double expected[6] = {98.4, 89.9, 89.6, 89.6, 89.9, 98.4};

    std::vector<PureKet> targets;
    for (int i = 0; i < 6; ++i) {
        const double beta = std::sqrt(1.0 - alphas[i] * alphas[i]);
        targets.emplace_back(alphas[i], std::polar(beta, chis[i]));
    }
    const CommonPlaneInversion inv = invert_rows_common_plane(geom, targets, dx);
    double fid[6] = {0};
    bool all_found = inv.found;
    for (int i = 0; i < 6; ++i) {
        if (!inv.rows[i].matched) {
            all_found = false;
            continue;
        }
        fid[i] = 100.0 * prep_fidelity(geom, {inv.rows[i].x, dx, inv.rows[i].z});
    }
    bool ok = all_found;
    for (int i = 0; i < 6; ++i) ok = ok && within(fid[i], expected[i], 1.0);
    ok = ok && std::abs(fid[2] - fid[3]) <= 0.1 && std::abs(fid[1] - fid[4]) <= 0.1 &&
         std::abs(fid[0] - fid[5]) <= 0.1;
    for (int i = 0; i < 6; ++i) CHECK(within(fid[i], expected[i], 1.0));
    CHECK(std::abs(fid[2] - fid[3]) <= 0.1);
    report(5, ok,
           fmt("theory fidelities %% = [%.2f %.2f %.2f %.2f %.2f %.2f] "
               "(expected [98.4 89.9 89.6 89.6 89.9 98.4] +- 1.0), plane z/f = %.4f",
               fid[0], fid[1], fid[2], fid[3], fid[4], fid[5],
               inv.plane_z / geom.focal_length),
           timer.seconds());
}

TEST_CASE("criterion 6: postselection sweep statistics") {
    Timer timer;
    const SweepStats sp = stats(stats_map(Maximize::Probability));
    const SweepStats sf = stats(stats_map(Maximize::Fidelity));

    // coarse-preset tolerances; the full-resolution opt-in tightens them
    const bool full = full_preset();
    const double p_rel = full ? 0.02 : 0.15;
    const double mean_tol = full ? 0.01 : 0.03;
    const double min_tol = full ? 0.02 : 0.05;

    const bool ok_p = std::abs(sp.probability.mean - 0.02952) <= p_rel * 0.02952 &&
                      within(sp.fidelity.mean, 0.8764, mean_tol) &&
                      within(sp.purity.mean, 0.8853, mean_tol) &&
                      within(sp.fidelity.min, 0.1964, min_tol) &&
                      within(sp.purity.min, 0.5057, min_tol);
    const bool ok_f = std::abs(sf.probability.mean - 0.01871) <= p_rel * 0.01871 &&
                      within(sf.fidelity.mean, 0.9024, mean_tol) &&
                      within(sf.purity.mean, 0.8987, mean_tol) &&
                      within(sf.fidelity.min, 0.2046, min_tol) &&
                      within(sf.purity.min, 0.5058, min_tol);
    // full-sphere coverage at the working resolution
    const long total_p = sp.occupied + sp.unoccupied;
    const bool ok_cov = sp.occupied >= 0.99 * total_p && sf.occupied >= 0.99 * total_p;

    CHECK(ok_p);
    CHECK(ok_f);
    CHECK(ok_cov);
    report(6, ok_p && ok_f && ok_cov,
           fmt("[%s preset] max-P <P>=%.5f (0.02952) <F>=%.4f (0.8764) <Pur>=%.4f (0.8853) "
               "Fmin=%.4f Purmin=%.4f | max-F <P>=%.5f (0.01871) <F>=%.4f (0.9024) "
               "<Pur>=%.4f (0.8987) | coverage %.2f%%",
               full ? "full" : "coarse", sp.probability.mean, sp.fidelity.mean,
               sp.purity.mean, sp.fidelity.min, sp.purity.min, sf.probability.mean,
               sf.fidelity.mean, sf.purity.mean,
               100.0 * double(sp.occupied) / total_p),
           timer.seconds());
}

TEST_CASE("criterion 7: strategy-comparison win fractions") {
    Timer timer;
    const OpticalGeometry g = reference_geometry();
    const CompareResult vs_p =
        compare_probability_maps(stats_map(Maximize::Probability), g, 20e-6);
    const CompareResult vs_f =
        compare_probability_maps(stats_map(Maximize::Fidelity), g, 20e-6);
    const bool ok = within(vs_p.povm_win_fraction, 0.614, 0.03) &&
                    within(vs_f.povm_win_fraction, 0.702, 0.03);
    CHECK(within(vs_p.povm_win_fraction, 0.614, 0.03));
    CHECK(within(vs_f.povm_win_fraction, 0.702, 0.03));
    report(7, ok,
           fmt("POVM wins %.1f%% vs max-P map (61.4 +- 3), %.1f%% vs max-F map (70.2 +- 3)",
               100.0 * vs_p.povm_win_fraction, 100.0 * vs_f.povm_win_fraction),
           timer.seconds());
}

TEST_CASE("criterion 8: detector-width limits") {
    Timer timer;
    const OpticalGeometry g = reference_geometry();
    const double f = g.focal_length;
    const double bucket = 20.0 * g.wavelength * f / g.slit_half_width;

    const DensityOperator rho = remote_state_finite(g, {0.0, bucket, f});
    double rho_dev = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            rho_dev = std::max(rho_dev,
                               std::abs(rho.at(r, c) - (r == c ? cplx(0.5, 0.0) : cplx(0.0, 0.0))));
    const double f_bucket = prep_fidelity(g, {0.0, bucket, f});
    const double p_bucket = prep_purity(g, {0.0, bucket, f});
    const double f_point = prep_fidelity(g, {0.0, 1e-9, f});
    const double p_point = prep_purity(g, {0.0, 1e-9, f});

    const bool ok = rho_dev < 1e-3 && within(f_bucket, 0.5, 1e-3) &&
                    within(p_bucket, 0.5, 1e-3) && f_point >= 1.0 - 1e-6 &&
                    p_point >= 1.0 - 1e-6;
    CHECK(rho_dev < 1e-3);
    CHECK(within(f_bucket, 0.5, 1e-3));
    CHECK(within(p_bucket, 0.5, 1e-3));
    CHECK(f_point >= 1.0 - 1e-6);
    CHECK(p_point >= 1.0 - 1e-6);
    report(8, ok,
           fmt("bucket: |rho - I/2| = %.2e, F = %.4f, Pur = %.4f; near-point: "
               "F = 1 - %.1e, Pur = 1 - %.1e",
               rho_dev, f_bucket, p_bucket, 1.0 - f_point, 1.0 - p_point),
           timer.seconds());
}

TEST_CASE("criterion 9: qudit preparation") {
    Timer timer;
    DetRng rng(20260810);
    double worst_prob = 0.0;
    double worst_fid = 0.0;
    for (int dim : {3, 5, 7}) {
        for (int i = 0; i < 100; ++i) {
            const PureKet target = rng.random_ket(dim);
            const SlitArraySettings s = qudit_settings_for_target(target);
            const auto [state, prob] = qudit_prepared_state(s, dim);
            worst_prob = std::max(worst_prob, std::abs(prob - 1.0 / dim));
            const double ov = std::abs(state.inner(target));
            worst_fid = std::max(worst_fid, 1.0 - ov * ov);
        }
    }

    OpticalGeometry qutrit = reference_geometry();
    qutrit.num_slits = 3;
    PureKet uniform(3);
    for (auto& a : uniform.amp) a = 1.0;
    uniform.normalize();
    const PureKet ket = qudit_postselect_ket(qutrit, 0.0, qutrit.focal_length);
    const double ov = std::abs(ket.inner(uniform));
    const double uniform_infid = 1.0 - ov * ov / ket.norm_sq();

    const bool ok = worst_prob < 1e-12 && worst_fid < 1e-12 && uniform_infid < 1e-9;
    CHECK(worst_prob < 1e-12);
    CHECK(worst_fid < 1e-12);
    CHECK(uniform_infid < 1e-9);
    report(9, ok,
           fmt("300 random targets: max |p - 1/D| = %.1e, max infidelity = %.1e; "
               "uniform target matched at (0, f) to %.1e",
               worst_prob, worst_fid, uniform_infid),
           timer.seconds());
}

TEST_CASE("criterion 10: sweep determinism") {
    Timer timer;
    const OpticalGeometry g = reference_geometry();
    const std::string reference = map_digest(coarse_determinism_map());

    SweepConfig cfg = coarse_config(Maximize::Probability);
    cfg.workers = 1;
    const bool same_1 = map_digest(run_postselect_sweep(g, 20e-6, cfg)) == reference;
    cfg.workers = 16;
    const bool same_16 = map_digest(run_postselect_sweep(g, 20e-6, cfg)) == reference;
    cfg.workers = 4;  // rerun of the reference configuration
    const bool same_rerun = map_digest(run_postselect_sweep(g, 20e-6, cfg)) == reference;

    const bool ok = same_1 && same_16 && same_rerun;
    CHECK(same_1);
    CHECK(same_16);
    CHECK(same_rerun);
    report(10, ok,
           fmt("coarse sweep bit-identical for 1/4/16 workers%s and across reruns%s",
               same_1 && same_16 ? "" : " (MISMATCH)", same_rerun ? "" : " (MISMATCH)"),
           timer.seconds());
}
