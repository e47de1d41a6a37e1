#include "rspsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rsp {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double suffix_scale(const std::string& unit) {
    if (unit.empty() || unit == "m") return 1.0;
    if (unit == "cm") return 1e-2;
    if (unit == "mm") return 1e-3;
    if (unit == "um" || unit == "µm" || unit == "μm") return 1e-6;
    if (unit == "nm") return 1e-9;
    throw config_error("unknown length unit '" + unit + "'");
}

double length_from_json(const json& v, const char* what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_length(v.get<std::string>());
    throw config_error(std::string("length field '") + what +
                       "' must be a number (meters) or a string with a unit");
}

Maximize maximize_from_string(const std::string& s) {
    if (s == "probability") return Maximize::Probability;
    if (s == "fidelity") return Maximize::Fidelity;
    throw config_error("maximize must be 'probability' or 'fidelity'");
}

Preset preset_from_string(const std::string& s) {
    if (s == "coarse") return Preset::Coarse;
    if (s == "full") return Preset::Full;
    throw config_error("preset must be 'coarse' or 'full'");
}

}  // namespace

double parse_length(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw config_error("empty length value");
    size_t pos = 0;
    double value;
    try {
        value = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw config_error("cannot parse length '" + text + "'");
    }
    const std::string unit = trim(t.substr(pos));
    return value * suffix_scale(unit);
}

SweepConfig RunConfig::sweep_config() const {
    SweepConfig sc;
    sc.n_theta = n_theta;
    sc.n_phi = n_phi;
    sc.x_step = x_step;
    sc.z_step = z_step();
    sc.maximize = maximize;
    sc.workers = workers;
    return sc;
}

MapFormat RunConfig::map_format() const {
    if (format == "csv") return MapFormat::Csv;
    if (format == "json") return MapFormat::Json;
    throw config_error("format must be 'csv' or 'json'");
}

void RunConfig::validate() const {
    try {
        geometry.validate();
    } catch (const domain_error& e) {
        throw config_error(e.what());
    }
    if (detector_width < 0.0) throw config_error("detector width must be >= 0");
    if (n_theta < 2 || n_phi < 1) throw config_error("Bloch grid too small");
    if (!(x_step > 0.0)) throw config_error("x step must be positive");
    if (workers < 0) throw config_error("workers must be >= 0");
    if (format != "csv" && format != "json")
        throw config_error("format must be 'csv' or 'json'");
}

RunConfig load_config_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw config_error(std::string("invalid config JSON: ") + e.what());
    }
    if (j.contains("schema_version") && j["schema_version"].get<int>() != 1)
        throw config_error("unsupported config schema_version");

    RunConfig cfg;
    if (j.contains("geometry")) {
        const json& g = j["geometry"];
        if (g.contains("slit_half_width"))
            cfg.geometry.slit_half_width = length_from_json(g["slit_half_width"], "slit_half_width");
        if (g.contains("slit_separation"))
            cfg.geometry.slit_separation = length_from_json(g["slit_separation"], "slit_separation");
        if (g.contains("wavelength"))
            cfg.geometry.wavelength = length_from_json(g["wavelength"], "wavelength");
        if (g.contains("focal_length"))
            cfg.geometry.focal_length = length_from_json(g["focal_length"], "focal_length");
        if (g.contains("num_slits")) cfg.geometry.num_slits = g["num_slits"].get<int>();
        if (g.contains("aperture_distance"))
            cfg.geometry.aperture_distance =
                length_from_json(g["aperture_distance"], "aperture_distance");
    }
    if (j.contains("detector")) {
        const json& d = j["detector"];
        if (d.contains("width")) cfg.detector_width = length_from_json(d["width"], "width");
        if (d.contains("x")) cfg.fixed_x = length_from_json(d["x"], "x");
        if (d.contains("z")) cfg.fixed_z = length_from_json(d["z"], "z");
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (s.contains("n_theta")) cfg.n_theta = s["n_theta"].get<int>();
        if (s.contains("n_phi")) cfg.n_phi = s["n_phi"].get<int>();
        if (s.contains("x_step")) cfg.x_step = length_from_json(s["x_step"], "x_step");
        if (s.contains("z_step"))
            cfg.z_step_override = length_from_json(s["z_step"], "z_step");
        if (s.contains("preset")) cfg.preset = preset_from_string(s["preset"].get<std::string>());
        if (s.contains("maximize"))
            cfg.maximize = maximize_from_string(s["maximize"].get<std::string>());
        if (s.contains("povm_scan_theta")) cfg.povm_scan_theta = s["povm_scan_theta"].get<int>();
        if (s.contains("povm_scan_chi")) cfg.povm_scan_chi = s["povm_scan_chi"].get<int>();
    }
    if (j.contains("output")) {
        const json& o = j["output"];
        if (o.contains("format")) cfg.format = o["format"].get<std::string>();
        if (o.contains("path")) cfg.out_path = o["path"].get<std::string>();
        if (o.contains("seed")) cfg.seed = o["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
    cfg.validate();
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return load_config_json(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "sweep.preset") cfg.preset = preset_from_string(value);
    else if (key == "sweep.maximize") cfg.maximize = maximize_from_string(value);
    else if (key == "sweep.n_theta") cfg.n_theta = std::stoi(value);
    else if (key == "sweep.n_phi") cfg.n_phi = std::stoi(value);
    else if (key == "sweep.x_step") cfg.x_step = parse_length(value);
    else if (key == "sweep.z_step") cfg.z_step_override = parse_length(value);
    else if (key == "detector.width") cfg.detector_width = parse_length(value);
    else if (key == "detector.x") cfg.fixed_x = parse_length(value);
    else if (key == "detector.z") cfg.fixed_z = parse_length(value);
    else if (key == "output.format") cfg.format = value;
    else if (key == "output.path") cfg.out_path = value;
    else if (key == "output.seed") cfg.seed = std::stoull(value);
    else if (key == "workers") cfg.workers = std::stoi(value);
    else throw config_error("unknown config key '" + key + "'");
    cfg.validate();
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["geometry"] = {{"slit_half_width", cfg.geometry.slit_half_width},
                     {"slit_separation", cfg.geometry.slit_separation},
                     {"wavelength", cfg.geometry.wavelength},
                     {"focal_length", cfg.geometry.focal_length},
                     {"num_slits", cfg.geometry.num_slits},
                     {"aperture_distance", cfg.geometry.aperture_distance}};
    j["detector"] = {{"width", cfg.detector_width}};
    if (cfg.fixed_x) j["detector"]["x"] = *cfg.fixed_x;
    if (cfg.fixed_z) j["detector"]["z"] = *cfg.fixed_z;
    j["sweep"] = {{"n_theta", cfg.n_theta},
                  {"n_phi", cfg.n_phi},
                  {"x_step", cfg.x_step},
                  {"preset", cfg.preset == Preset::Coarse ? "coarse" : "full"},
                  {"maximize", maximize_name(cfg.maximize)},
                  {"povm_scan_theta", cfg.povm_scan_theta},
                  {"povm_scan_chi", cfg.povm_scan_chi}};
    if (cfg.z_step_override) j["sweep"]["z_step"] = *cfg.z_step_override;
    j["output"] = {{"format", cfg.format}, {"path", cfg.out_path}, {"seed", cfg.seed}};
    j["workers"] = cfg.workers;
    return j.dump(2);
}

}  // namespace rsp
