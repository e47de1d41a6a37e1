#ifndef RSPSIM_CONFIG_HPP
#define RSPSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "rspsim/geometry.hpp"
#include "rspsim/sweep.hpp"

namespace rsp {

enum class Preset { Coarse, Full };

// Everything a run needs; defaults are the reference double-slit stage
// (a = 40 um, d = 250 um, lambda = 670 nm, f = 30 cm, detector 20 um).
struct RunConfig {
    OpticalGeometry geometry{40e-6, 250e-6, 670e-9, 0.3, 2, 0.0};

    // detector block
    double detector_width = 20e-6;
    std::optional<double> fixed_x;
    std::optional<double> fixed_z;

    // sweep block
    int n_theta = 300;
    int n_phi = 600;
    double x_step = 20e-6;
    std::optional<double> z_step_override;  // otherwise set by the preset
    Preset preset = Preset::Coarse;
    Maximize maximize = Maximize::Probability;
    int povm_scan_theta = 101;
    int povm_scan_chi = 200;

    // output block
    std::string format = "csv";  // csv | json
    std::string out_path;
    std::uint64_t seed = 1;
    int workers = 0;

    double z_step() const {
        if (z_step_override) return *z_step_override;
        return preset == Preset::Coarse ? 100e-6 : 1e-6;
    }
    SweepConfig sweep_config() const;
    MapFormat map_format() const;

    void validate() const;
};

// "0.3", "30cm", "250um", "670 nm" -> meters.
double parse_length(const std::string& text);

RunConfig load_config_json(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Apply one "section.key=value" override (the CLI flag path).
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

std::string config_to_json(const RunConfig& cfg);

}  // namespace rsp

#endif
