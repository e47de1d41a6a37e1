// Command-line front end. Talks to the simulator exclusively through the
// C interface of the shared library.

#include <cmath>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rspsim/rspsim_c.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

int exit_code_for(rsp_status s) {
    switch (s) {
        case RSP_OK: return kExitOk;
        case RSP_ERR_CONFIG:
        case RSP_ERR_DOMAIN:
        case RSP_ERR_NULL: return kExitUsage;
        default: return kExitNumeric;
    }
}

int report(rsp_status s) {
    if (s != RSP_OK) std::fprintf(stderr, "error: %s\n", rsp_last_error());
    return exit_code_for(s);
}

struct ConfigHandle {
    rsp_config* ptr = nullptr;
    ~ConfigHandle() { rsp_config_destroy(ptr); }
};

struct GeometryHandle {
    rsp_geometry* ptr = nullptr;
    ~GeometryHandle() { rsp_geometry_destroy(ptr); }
};

struct StringOut {
    char* ptr = nullptr;
    ~StringOut() { rsp_string_free(ptr); }
};

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string maximize;
    std::string format;
    std::string out_path;
    std::string seed;
    int workers = -1;
};

rsp_status build_config(const CommonOpts& opts, ConfigHandle& cfg) {
    rsp_status s = opts.config_path.empty()
                       ? rsp_config_create_default(&cfg.ptr)
                       : rsp_config_load_file(opts.config_path.c_str(), &cfg.ptr);
    if (s != RSP_OK) return s;
    auto set = [&](const char* key, const std::string& value) -> rsp_status {
        if (value.empty()) return RSP_OK;
        return rsp_config_override(cfg.ptr, key, value.c_str());
    };
    if ((s = set("sweep.preset", opts.preset))) return s;
    if ((s = set("sweep.maximize", opts.maximize))) return s;
    if ((s = set("output.format", opts.format))) return s;
    if ((s = set("output.path", opts.out_path))) return s;
    if ((s = set("output.seed", opts.seed))) return s;
    if (opts.workers >= 0)
        if ((s = set("workers", std::to_string(opts.workers)))) return s;
    return RSP_OK;
}

// Resolves --z / --z-over-f into meters.
rsp_status resolve_plane(const GeometryHandle& geom, const std::string& z_text,
                         double z_over_f, double& z_out) {
    if (!z_text.empty()) return rsp_parse_length(z_text.c_str(), &z_out);
    double f = 0.0;
    if (rsp_status s =
            rsp_geometry_params(geom.ptr, nullptr, nullptr, nullptr, &f, nullptr, nullptr))
        return s;
    z_out = z_over_f * f;
    return RSP_OK;
}

const char* regime_label(int regime) {
    switch (regime) {
        case RSP_REGIME_FRAUNHOFER: return "fraunhofer";
        case RSP_REGIME_FRESNEL: return "fresnel";
        case RSP_REGIME_IMAGE_PLANE: return "image_plane";
    }
    return "?";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical simulator for remote preparation of slit-encoded "
                 "photonic qubits and qudits"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "JSON configuration file");
    app.add_option("--preset", opts.preset, "sweep preset: coarse|full")
        ->check(CLI::IsMember({"coarse", "full"}));
    app.add_option("--maximize", opts.maximize, "sweep target: probability|fidelity")
        ->check(CLI::IsMember({"probability", "fidelity"}));
    app.add_option("--workers", opts.workers, "worker thread count (0 = auto)");
    app.add_option("--format", opts.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", opts.out_path, "output file path");
    app.add_option("--seed", opts.seed, "random seed for sampled runs");

    // amplitude -----------------------------------------------------------
    auto* cmd_amp = app.add_subcommand("amplitude", "single-slit propagation amplitude");
    std::string amp_slit = "l";
    std::string amp_x = "0";
    std::string amp_z;
    double amp_z_over_f = 1.0;
    cmd_amp->add_option("--slit", amp_slit, "slit: l|r")->check(CLI::IsMember({"l", "r"}));
    cmd_amp->add_option("--x", amp_x, "transverse position (length, e.g. 402um)");
    cmd_amp->add_option("--z", amp_z, "detection plane (length)");
    cmd_amp->add_option("--z-over-f", amp_z_over_f, "detection plane in units of f");

    // postselect ----------------------------------------------------------
    auto* cmd_post = app.add_subcommand("postselect", "spatial-postselection figures of merit");
    std::string post_x = "0";
    std::string post_z;
    double post_z_over_f = 1.0;
    std::string post_dx;
    cmd_post->add_option("--x", post_x, "window center (length)");
    cmd_post->add_option("--z", post_z, "detection plane (length)");
    cmd_post->add_option("--z-over-f", post_z_over_f, "detection plane in units of f");
    cmd_post->add_option("--dx", post_dx, "detector width (length; default from config)");

    // povm ------------------------------------------------------------------
    auto* cmd_povm = app.add_subcommand("povm", "generalized-measurement figures of merit");
    double povm_theta = -1.0;
    double povm_alpha = -1.0;
    double povm_chi = 0.0;
    int povm_pixel = 1;
    std::string povm_port = "V";
    std::string povm_dx;
    cmd_povm->add_option("--theta", povm_theta, "wave-plate angle Theta (rad)");
    cmd_povm->add_option("--alpha", povm_alpha, "target |alpha| (sets Theta = acos(|alpha|)/2)");
    cmd_povm->add_option("--chi", povm_chi, "target phase arg(beta/alpha) (rad)");
    cmd_povm->add_option("--pixel", povm_pixel, "detector pixel: 1|2")
        ->check(CLI::IsMember({1, 2}));
    cmd_povm->add_option("--port", povm_port, "PBS port: H|V")
        ->check(CLI::IsMember({"H", "V"}));
    cmd_povm->add_option("--dx", povm_dx, "detector width (length; default from config)");

    // map commands ----------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "Bloch-sphere maximization sweep");
    auto* cmd_stats = app.add_subcommand("stats", "statistics of an exported sweep map");
    std::string stats_map;
    cmd_stats->add_option("--map", stats_map, "sweep map file (csv or json)")->required();
    auto* cmd_compare =
        app.add_subcommand("compare", "postselection vs generalized-measurement probability maps");
    auto* cmd_table2 = app.add_subcommand("table2", "fidelity comparison on the reference experiment");
    auto* cmd_table3 = app.add_subcommand("table3", "figure-of-merit statistics for both strategies");

    // qudit -------------------------------------------------------------------
    auto* cmd_qudit = app.add_subcommand("qudit", "qudit preparation settings and state");
    std::string qudit_target;
    cmd_qudit->add_option("--target", qudit_target,
                          "target: uniform:D | basis:D:j | JSON amplitude list")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    ConfigHandle cfg;
    if (rsp_status s = build_config(opts, cfg)) return report(s);

    const bool json_output = opts.format == "json";

    if (cmd_amp->parsed()) {
        GeometryHandle geom;
        if (rsp_status s = rsp_config_geometry(cfg.ptr, &geom.ptr)) return report(s);
        double x = 0.0, z = 0.0;
        if (rsp_status s = rsp_parse_length(amp_x.c_str(), &x)) return report(s);
        if (rsp_status s = resolve_plane(geom, amp_z, amp_z_over_f, z)) return report(s);
        double re = 0.0, im = 0.0, kappa = 0.0;
        int regime = 0;
        const int slit = amp_slit == "l" ? RSP_SLIT_LEFT : RSP_SLIT_RIGHT;
        if (rsp_status s = rsp_amplitude(geom.ptr, slit, x, z, &re, &im, &regime, &kappa))
            return report(s);
        if (json_output) {
            std::printf("{\"re\": %.17g, \"im\": %.17g, \"regime\": \"%s\", \"kappa\": %.17g}\n",
                        re, im, regime_label(regime), kappa);
        } else {
            std::printf("phi_%s(%g m, %g m) = %.10g %+.10gi  (regime %s, kappa %.6g)\n",
                        amp_slit.c_str(), x, z, re, im, regime_label(regime), kappa);
        }
        return kExitOk;
    }

    if (cmd_post->parsed()) {
        GeometryHandle geom;
        if (rsp_status s = rsp_config_geometry(cfg.ptr, &geom.ptr)) return report(s);
        double x = 0.0, z = 0.0;
        if (rsp_status s = rsp_parse_length(post_x.c_str(), &x)) return report(s);
        if (rsp_status s = resolve_plane(geom, post_z, post_z_over_f, z)) return report(s);
        double dx = 0.0;
        if (rsp_status s = rsp_config_detector_width(cfg.ptr, &dx)) return report(s);
        if (!post_dx.empty())
            if (rsp_status s = rsp_parse_length(post_dx.c_str(), &dx)) return report(s);
        double p = 0.0, f = 0.0, pur = 0.0;
        if (rsp_status s = rsp_postselect_figures(geom.ptr, x, z, dx, &p, &f, &pur))
            return report(s);
        if (json_output)
            std::printf("{\"P\": %.17g, \"F\": %.17g, \"Pur\": %.17g}\n", p, f, pur);
        else
            std::printf("P = %.6g   F = %.10g   Pur = %.10g\n", p, f, pur);
        return kExitOk;
    }

    if (cmd_povm->parsed()) {
        GeometryHandle geom;
        if (rsp_status s = rsp_config_geometry(cfg.ptr, &geom.ptr)) return report(s);
        double theta = povm_theta;
        if (povm_alpha >= 0.0) theta = 0.5 * std::acos(povm_alpha);
        if (theta < 0.0) theta = 0.0;
        double dx = 0.0;
        if (rsp_status s = rsp_config_detector_width(cfg.ptr, &dx)) return report(s);
        if (!povm_dx.empty())
            if (rsp_status s = rsp_parse_length(povm_dx.c_str(), &dx)) return report(s);
        double p = 0.0, f = 0.0, pur = 0.0;
        const int port = povm_port == "H" ? RSP_PORT_H : RSP_PORT_V;
        if (rsp_status s = rsp_povm_figures(geom.ptr, theta, povm_chi, povm_pixel, port,
                                            dx, &p, &f, &pur))
            return report(s);
        if (json_output)
            std::printf("{\"P_tot\": %.17g, \"F\": %.17g, \"Pur\": %.17g}\n", p, f, pur);
        else
            std::printf("P_tot = %.6g   F = %.10g   Pur = %.10g\n", p, f, pur);
        return kExitOk;
    }

    StringOut out;
    rsp_status s = RSP_OK;
    if (cmd_sweep->parsed()) s = rsp_run_sweep(cfg.ptr, &out.ptr);
    else if (cmd_stats->parsed()) s = rsp_map_stats(stats_map.c_str(), &out.ptr);
    else if (cmd_compare->parsed()) s = rsp_run_compare(cfg.ptr, &out.ptr);
    else if (cmd_table2->parsed()) s = rsp_run_table2(cfg.ptr, &out.ptr);
    else if (cmd_table3->parsed()) s = rsp_run_table3(cfg.ptr, &out.ptr);
    else if (cmd_qudit->parsed()) s = rsp_run_qudit(cfg.ptr, qudit_target.c_str(), &out.ptr);
    if (s != RSP_OK) return report(s);
    if (out.ptr) std::printf("%s\n", out.ptr);
    return kExitOk;
}
