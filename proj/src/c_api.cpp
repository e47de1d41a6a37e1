#include "rspsim/rspsim_c.h"

#include <cstring>
#include <new>
#include <string>

#include "rspsim/config.hpp"
#include "rspsim/errors.hpp"
#include "rspsim/geometry.hpp"
#include "rspsim/postselect.hpp"
#include "rspsim/povm.hpp"
#include "rspsim/recipes.hpp"

struct rsp_geometry {
    rsp::OpticalGeometry geom;
};

struct rsp_config {
    rsp::RunConfig cfg;
};

namespace {

thread_local std::string tls_error;

rsp_status fail(rsp_status code, const char* what) {
    tls_error = what ? what : "";
    return code;
}

template <typename Fn>
rsp_status guarded(Fn&& fn) {
    try {
        fn();
        return RSP_OK;
    } catch (const rsp::config_error& e) {
        return fail(RSP_ERR_CONFIG, e.what());
    } catch (const rsp::domain_error& e) {
        return fail(RSP_ERR_DOMAIN, e.what());
    } catch (const rsp::numeric_error& e) {
        return fail(RSP_ERR_NUMERIC, e.what());
    } catch (const rsp::degenerate_point_error& e) {
        return fail(RSP_ERR_DEGENERATE, e.what());
    } catch (const rsp::degenerate_window_error& e) {
        return fail(RSP_ERR_DEGENERATE, e.what());
    } catch (const rsp::io_error& e) {
        return fail(RSP_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RSP_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RSP_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RSP_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

rsp_status require(bool ok, const char* what) {
    return ok ? RSP_OK : fail(RSP_ERR_NULL, what);
}

}  // namespace

extern "C" {

const char* rsp_version(void) { return "0.1.0"; }

const char* rsp_last_error(void) { return tls_error.c_str(); }

rsp_status rsp_config_create_default(rsp_config** out) {
    if (rsp_status s = require(out, "null output pointer")) return s;
    return guarded([&] { *out = new rsp_config{}; });
}

rsp_status rsp_config_load_json(const char* json_text, rsp_config** out) {
    if (rsp_status s = require(json_text && out, "null argument")) return s;
    return guarded([&] { *out = new rsp_config{rsp::load_config_json(json_text)}; });
}

rsp_status rsp_config_load_file(const char* path, rsp_config** out) {
    if (rsp_status s = require(path && out, "null argument")) return s;
    return guarded([&] { *out = new rsp_config{rsp::load_config_file(path)}; });
}

rsp_status rsp_config_override(rsp_config* cfg, const char* key, const char* value) {
    if (rsp_status s = require(cfg && key && value, "null argument")) return s;
    return guarded([&] { rsp::apply_override(cfg->cfg, key, value); });
}

rsp_status rsp_config_to_json(const rsp_config* cfg, char** json_out) {
    if (rsp_status s = require(cfg && json_out, "null argument")) return s;
    return guarded([&] { *json_out = dup_string(rsp::config_to_json(cfg->cfg)); });
}

rsp_status rsp_config_geometry(const rsp_config* cfg, rsp_geometry** out) {
    if (rsp_status s = require(cfg && out, "null argument")) return s;
    return guarded([&] { *out = new rsp_geometry{cfg->cfg.geometry}; });
}

rsp_status rsp_config_detector_width(const rsp_config* cfg, double* width) {
    if (rsp_status s = require(cfg && width, "null argument")) return s;
    *width = cfg->cfg.detector_width;
    return RSP_OK;
}

void rsp_config_destroy(rsp_config* cfg) { delete cfg; }

rsp_status rsp_geometry_create(double slit_half_width, double slit_separation,
                               double wavelength, double focal_length,
                               int num_slits, double aperture_distance,
                               rsp_geometry** out) {
    if (rsp_status s = require(out, "null output pointer")) return s;
    return guarded([&] {
        rsp::OpticalGeometry g{slit_half_width, slit_separation, wavelength,
                               focal_length, num_slits, aperture_distance};
        g.validate();
        *out = new rsp_geometry{g};
    });
}

rsp_status rsp_geometry_params(const rsp_geometry* geom, double* slit_half_width,
                               double* slit_separation, double* wavelength,
                               double* focal_length, int* num_slits,
                               double* aperture_distance) {
    if (rsp_status s = require(geom, "null geometry")) return s;
    if (slit_half_width) *slit_half_width = geom->geom.slit_half_width;
    if (slit_separation) *slit_separation = geom->geom.slit_separation;
    if (wavelength) *wavelength = geom->geom.wavelength;
    if (focal_length) *focal_length = geom->geom.focal_length;
    if (num_slits) *num_slits = geom->geom.num_slits;
    if (aperture_distance) *aperture_distance = geom->geom.aperture_distance;
    return RSP_OK;
}

void rsp_geometry_destroy(rsp_geometry* geom) { delete geom; }

rsp_status rsp_parse_length(const char* text, double* meters) {
    if (rsp_status s = require(text && meters, "null argument")) return s;
    return guarded([&] { *meters = rsp::parse_length(text); });
}

rsp_status rsp_amplitude(const rsp_geometry* geom, int slit, double x, double z,
                         double* re, double* im, int* regime, double* kappa) {
    if (rsp_status s = require(geom && re && im, "null argument")) return s;
    return guarded([&] {
        const std::complex<double> v = rsp::slit_amplitude(geom->geom, slit, x, z);
        *re = v.real();
        *im = v.imag();
        if (regime)
            *regime = static_cast<int>(rsp::classify_regime(geom->geom, z));
        if (kappa)
            *kappa = rsp::propagation_params(geom->geom, z).phase_parameter;
    });
}

rsp_status rsp_remote_target(const rsp_geometry* geom, double x, double z,
                             double* alpha_re, double* alpha_im,
                             double* beta_re, double* beta_im) {
    if (rsp_status s =
            require(geom && alpha_re && alpha_im && beta_re && beta_im, "null argument"))
        return s;
    return guarded([&] {
        const rsp::PureKet t = rsp::remote_target_point(geom->geom, x, z);
        *alpha_re = t.amp[0].real();
        *alpha_im = t.amp[0].imag();
        *beta_re = t.amp[1].real();
        *beta_im = t.amp[1].imag();
    });
}

rsp_status rsp_postselect_figures(const rsp_geometry* geom, double x, double z,
                                  double dx, double* probability,
                                  double* fidelity, double* purity) {
    if (rsp_status s =
            require(geom && probability && fidelity && purity, "null argument"))
        return s;
    return guarded([&] {
        const rsp::FigureTriple t = rsp::prep_figures(geom->geom, {x, dx, z});
        *probability = t.probability;
        *fidelity = t.fidelity;
        *purity = t.purity;
    });
}

rsp_status rsp_povm_figures(const rsp_geometry* geom, double theta, double chi,
                            int pixel, int port, double dx,
                            double* total_probability, double* fidelity,
                            double* purity) {
    if (rsp_status s =
            require(geom && total_probability && fidelity && purity, "null argument"))
        return s;
    if (pixel != 1 && pixel != 2) return fail(RSP_ERR_DOMAIN, "pixel must be 1 or 2");
    if (port != RSP_PORT_H && port != RSP_PORT_V)
        return fail(RSP_ERR_DOMAIN, "port must be RSP_PORT_H or RSP_PORT_V");
    return guarded([&] {
        const rsp::PovmSettings s{theta, chi};
        const rsp::Outcome o{pixel, port == RSP_PORT_H ? rsp::Port::H : rsp::Port::V};
        *total_probability = rsp::total_probability(s, geom->geom, dx);
        *fidelity = rsp::povm_fidelity(s, o, geom->geom, dx);
        *purity = rsp::povm_purity(s, o, geom->geom, dx);
    });
}

rsp_status rsp_run_sweep(const rsp_config* cfg, char** json_out) {
    if (rsp_status s = require(cfg && json_out, "null argument")) return s;
    return guarded([&] { *json_out = dup_string(rsp::run_sweep_cmd(cfg->cfg)); });
}

rsp_status rsp_run_table2(const rsp_config* cfg, char** json_out) {
    if (rsp_status s = require(cfg && json_out, "null argument")) return s;
    return guarded([&] { *json_out = dup_string(rsp::run_table2_cmd(cfg->cfg)); });
}

rsp_status rsp_run_table3(const rsp_config* cfg, char** json_out) {
    if (rsp_status s = require(cfg && json_out, "null argument")) return s;
    return guarded([&] { *json_out = dup_string(rsp::run_table3_cmd(cfg->cfg)); });
}

rsp_status rsp_run_compare(const rsp_config* cfg, char** json_out) {
    if (rsp_status s = require(cfg && json_out, "null argument")) return s;
    return guarded([&] { *json_out = dup_string(rsp::run_compare_cmd(cfg->cfg)); });
}

rsp_status rsp_run_qudit(const rsp_config* cfg, const char* target_spec,
                         char** json_out) {
    if (rsp_status s = require(cfg && target_spec && json_out, "null argument")) return s;
    return guarded(
        [&] { *json_out = dup_string(rsp::run_qudit_cmd(cfg->cfg, target_spec)); });
}

rsp_status rsp_map_stats(const char* map_path, char** json_out) {
    if (rsp_status s = require(map_path && json_out, "null argument")) return s;
    return guarded([&] { *json_out = dup_string(rsp::run_map_stats_cmd(map_path)); });
}

void rsp_string_free(char* s) { delete[] s; }

}  // extern "C"
