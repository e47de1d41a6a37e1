/*
 * C interface to the rspsim shared library.
 *
 * All entry points return an rsp_status code; RSP_OK means success. On
 * failure, rsp_last_error() returns a thread-local description. Handles are
 * opaque and must be released with the matching *_destroy call; strings
 * returned through char** out-parameters must be freed with rsp_string_free.
 */
#ifndef RSPSIM_C_H
#define RSPSIM_C_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct rsp_geometry rsp_geometry;
typedef struct rsp_config rsp_config;

typedef enum rsp_status {
    RSP_OK = 0,
    RSP_ERR_NUMERIC = 1,     /* quadrature or iteration failed to converge */
    RSP_ERR_CONFIG = 2,      /* malformed configuration or argument syntax */
    RSP_ERR_DOMAIN = 3,      /* argument outside the physical range */
    RSP_ERR_DEGENERATE = 4,  /* diffraction zero / empty detector window */
    RSP_ERR_IO = 5,
    RSP_ERR_NULL = 6,
    RSP_ERR_INTERNAL = 7
} rsp_status;

typedef enum rsp_regime {
    RSP_REGIME_FRAUNHOFER = 0,
    RSP_REGIME_FRESNEL = 1,
    RSP_REGIME_IMAGE_PLANE = 2
} rsp_regime;

/* Qubit slit indices. */
#define RSP_SLIT_LEFT 0
#define RSP_SLIT_RIGHT 1

/* Detector ports of the generalized measurement. */
#define RSP_PORT_H 0
#define RSP_PORT_V 1

const char* rsp_version(void);

/* Thread-local message for the last failing call on this thread. */
const char* rsp_last_error(void);

/* --- configuration ----------------------------------------------------- */

rsp_status rsp_config_create_default(rsp_config** out);
rsp_status rsp_config_load_json(const char* json_text, rsp_config** out);
rsp_status rsp_config_load_file(const char* path, rsp_config** out);
/* Dotted keys, e.g. "sweep.preset"="full", "output.path"="map.csv". */
rsp_status rsp_config_override(rsp_config* cfg, const char* key, const char* value);
rsp_status rsp_config_to_json(const rsp_config* cfg, char** json_out);
rsp_status rsp_config_geometry(const rsp_config* cfg, rsp_geometry** out);
rsp_status rsp_config_detector_width(const rsp_config* cfg, double* width);
void rsp_config_destroy(rsp_config* cfg);

/* --- geometry and point evaluations ------------------------------------ */

rsp_status rsp_geometry_create(double slit_half_width, double slit_separation,
                               double wavelength, double focal_length,
                               int num_slits, double aperture_distance,
                               rsp_geometry** out);
rsp_status rsp_geometry_params(const rsp_geometry* geom, double* slit_half_width,
                               double* slit_separation, double* wavelength,
                               double* focal_length, int* num_slits,
                               double* aperture_distance);
void rsp_geometry_destroy(rsp_geometry* geom);

/* Parse a length like "0.3", "30cm", "250um", "670nm" into meters. */
rsp_status rsp_parse_length(const char* text, double* meters);

/* Single-slit propagation amplitude phi_j(x, z), with the regime tag and the
 * quadratic-phase parameter kappa of the plane. */
rsp_status rsp_amplitude(const rsp_geometry* geom, int slit, double x, double z,
                         double* re, double* im, int* regime, double* kappa);

/* Normalized state prepared on the remote side by a point detection. */
rsp_status rsp_remote_target(const rsp_geometry* geom, double x, double z,
                             double* alpha_re, double* alpha_im,
                             double* beta_re, double* beta_im);

/* Probability / fidelity / purity of the postselection strategy for a
 * detector window of width dx centered at (x, z). */
rsp_status rsp_postselect_figures(const rsp_geometry* geom, double x, double z,
                                  double dx, double* probability,
                                  double* fidelity, double* purity);

/* Figures of the generalized-measurement strategy: wave-plate angle theta,
 * target phase chi, detector pixel (1|2) and port (RSP_PORT_*). */
rsp_status rsp_povm_figures(const rsp_geometry* geom, double theta, double chi,
                            int pixel, int port, double dx,
                            double* total_probability, double* fidelity,
                            double* purity);

/* --- command backends (JSON out, data files per config) ----------------- */

rsp_status rsp_run_sweep(const rsp_config* cfg, char** json_out);
rsp_status rsp_run_table2(const rsp_config* cfg, char** json_out);
rsp_status rsp_run_table3(const rsp_config* cfg, char** json_out);
rsp_status rsp_run_compare(const rsp_config* cfg, char** json_out);
rsp_status rsp_run_qudit(const rsp_config* cfg, const char* target_spec,
                         char** json_out);
rsp_status rsp_map_stats(const char* map_path, char** json_out);

void rsp_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* RSPSIM_C_H */
