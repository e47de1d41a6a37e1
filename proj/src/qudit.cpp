#include "rspsim/qudit.hpp"

#include <cmath>
#include <string>

#include "rspsim/rng.hpp"

namespace rsp {

namespace {
void require_qudit_dim(int dim) {
    if (dim != 2 && (dim < 3 || dim % 2 == 0))
        throw domain_error("qudit dimension must be 2 or an odd integer >= 3");
}
}  // namespace

PureKet entangled_qudit_state(const OpticalGeometry& geom, int dim, bool with_mu) {
    require_qudit_dim(dim);
    if (with_mu && !(geom.aperture_distance > 0.0))
        throw domain_error("pump phases require a positive aperture distance z_ap");

    PureKet psi(dim * dim);
    const double inv = 1.0 / std::sqrt(static_cast<double>(dim));
    const int ell = (dim - 1) / 2;
    const double k = geom.wavenumber();
    const double d = geom.slit_separation;
    for (int m = 0; m < dim; ++m) {
        const int partner = dim - 1 - m;  // ordinal of -j
        double mu = 0.0;
        if (with_mu && dim != 2) {
            const double j = static_cast<double>(m - ell);
            mu = k * d * d * j * j / (2.0 * geom.aperture_distance);
        }
        psi.amp[static_cast<size_t>(m) * dim + partner] = std::polar(inv, mu);
    }
    return psi;
}

PureKet qudit_postselect_ket(const OpticalGeometry& geom, double x, double z,
                             double quad_tol) {
    return point_postselect_ket(geom, x, z, quad_tol);
}

SlitArraySettings qudit_settings_for_target(const PureKet& target) {
    const int dim = target.dim();
    require_qudit_dim(dim);
    const PureKet t = target.normalized();
    SlitArraySettings s;
    s.theta.resize(dim);
    s.phase.resize(dim);
    for (int m = 0; m < dim; ++m) {
        const cplx c = t.amp[dim - 1 - m];  // target component at -j
        const double mag = std::clamp(std::abs(c), 0.0, 1.0);
        s.theta[m] = 0.5 * std::acos(mag);
        s.phase[m] = mag < 1e-15 ? 0.0 : std::arg(c);
    }
    return s;
}

std::pair<PureKet, double> qudit_prepared_state(const SlitArraySettings& settings,
                                                int dim) {
    require_qudit_dim(dim);
    if (settings.dim() != dim ||
        static_cast<int>(settings.phase.size()) != dim)
        throw domain_error("settings dimension does not match the qudit dimension");
    PureKet psi(dim);
    double weight = 0.0;
    for (int m = 0; m < dim; ++m) {
        const double c = std::cos(2.0 * settings.theta[m]);
        weight += c * c;
        psi.amp[dim - 1 - m] = std::polar(c, settings.phase[m]);
    }
    const double prob = weight / dim;
    if (!(weight > 0.0))
        throw degenerate_point_error("all wave plates fully attenuate the H port");
    psi.normalize();
    return {psi, prob};
}

ReachabilityReport qudit_postselect_reachability(
    const OpticalGeometry& geom, int dim, const std::vector<double>& z_grid,
    const std::vector<double>& x_grid, int n_samples, std::uint64_t seed,
    double fid_tol, double quad_tol) {
    require_qudit_dim(dim);
    if (geom.num_slits != dim)
        throw domain_error("geometry slit count must equal the qudit dimension");

    DetRng rng(seed);
    ReachabilityReport rep;
    rep.total = n_samples;
    for (int s = 0; s < n_samples; ++s) {
        const PureKet target = rng.random_ket(dim);
        bool matched = false;
        for (double z : z_grid) {
            for (double x : x_grid) {
                PureKet ket = qudit_postselect_ket(geom, x, z, quad_tol);
                const double n2 = ket.norm_sq();
                if (!(n2 > 0.0)) continue;
                const double ov = std::abs(ket.inner(target));
                if (1.0 - ov * ov / n2 <= fid_tol) {
                    matched = true;
                    break;
                }
            }
            if (matched) break;
        }
        if (matched) ++rep.matched;
    }
    rep.fraction = rep.total > 0 ? static_cast<double>(rep.matched) / rep.total : 0.0;
    return rep;
}

}  // namespace rsp
