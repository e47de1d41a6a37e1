#include "rspsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

namespace rsp {

namespace {
constexpr double kPi = std::numbers::pi;

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct StatAccumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::int64_t n = 0;

    void add(double v) {
        if (n == 0) {
            lo = hi = v;
        } else {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        sum += v;
        sum_sq += v * v;
        ++n;
    }

    StatLine line() const {
        StatLine s;
        if (n == 0) return s;
        s.mean = sum / n;
        s.min = lo;
        s.max = hi;
        const double var = std::max(0.0, sum_sq / n - s.mean * s.mean);
        s.stddev = std::sqrt(var);
        return s;
    }
};

}  // namespace

const char* maximize_name(Maximize m) {
    return m == Maximize::Probability ? "probability" : "fidelity";
}

double SweepMap::theta_center(int row) const {
    return (row + 0.5) * kPi / n_theta;
}

double SweepMap::phi_center(int col) const {
    return -kPi + (col + 0.5) * 2.0 * kPi / n_phi;
}

bool cell_wins(const SweepCell& a, const SweepCell& b) {
    if (!a.occupied) return false;
    if (!b.occupied) return true;
    if (a.value != b.value) return a.value > b.value;
    if (a.z != b.z) return a.z < b.z;
    return a.x < b.x;
}

void merge_maps(SweepMap& into, const SweepMap& other) {
    if (into.n_theta != other.n_theta || into.n_phi != other.n_phi)
        throw domain_error("cannot merge sweep maps with different grids");
    for (size_t i = 0; i < into.cells.size(); ++i)
        if (cell_wins(other.cells[i], into.cells[i])) into.cells[i] = other.cells[i];
    into.degenerate_skips += other.degenerate_skips;
}

std::vector<double> sweep_x_positions(const OpticalGeometry& geom, double x_step) {
    if (!(x_step > 0.0)) throw domain_error("x step must be positive");
    const double half_range =
        kPi * geom.focal_length / (geom.wavenumber() * geom.slit_half_width);
    const int n = static_cast<int>(std::floor(2.0 * half_range / x_step + 1e-9));
    std::vector<double> xs(n);
    for (int m = 0; m < n; ++m) xs[m] = (m - 0.5 * (n - 1)) * x_step;
    return xs;
}

std::vector<double> sweep_z_planes(const OpticalGeometry& geom, double z_step) {
    if (!(z_step > 0.0)) throw domain_error("z step must be positive");
    const double f = geom.focal_length;
    const int n = static_cast<int>(std::floor(f / z_step + 1e-9));
    std::vector<double> zs;
    zs.reserve(n + 2);
    for (int i = 0; i <= n; ++i) {
        double z = f + i * z_step;
        if (std::abs(z - 2.0 * f) < 1e-9 * f) z = 2.0 * f;
        if (z > 2.0 * f) break;
        zs.push_back(z);
    }
    if (zs.back() < 2.0 * f - 0.5 * z_step) zs.push_back(2.0 * f);
    return zs;
}

namespace {

// Scan one detection plane into the partial grid.
void scan_plane(const OpticalGeometry& geom, double detector_width,
                const SweepConfig& cfg, const std::vector<double>& xs, double z,
                SweepMap& grid) {
    const double ref_density = reference_density(geom, z, cfg.quad_tol);
    const double density_floor = kDegenerateDensityRel * ref_density;

    for (double x : xs) {
        const cplx amp_l = slit_amplitude(geom, kSlitLeft, x, z, cfg.quad_tol);
        const cplx amp_r = slit_amplitude(geom, kSlitRight, x, z, cfg.quad_tol);
        const double density = std::norm(amp_l) + std::norm(amp_r);
        if (!(density > density_floor)) {
            ++grid.degenerate_skips;
            continue;
        }

        // Bob's point target: |c_l| = |phi_r|, |c_r| = |phi_l|,
        // relative phase arg(c_r c_l*) = arg(phi_r phi_l*).
        const double mag_l = std::abs(amp_r);
        const double mag_r = std::abs(amp_l);
        const double theta = 2.0 * std::atan2(mag_r, mag_l);
        int row = std::min(grid.n_theta - 1,
                           static_cast<int>(theta / kPi * grid.n_theta));
        int col = 0;
        if (!grid.pole_row(row)) {
            double phi = std::arg(amp_r * std::conj(amp_l));
            if (phi >= kPi) phi = -kPi;
            col = std::min(grid.n_phi - 1,
                           static_cast<int>((phi + kPi) / (2.0 * kPi) * grid.n_phi));
            col = std::max(0, col);
        }

        FigureTriple fig;
        try {
            const OverlapMatrix phi_w =
                overlap_matrix(geom, {x, detector_width, z}, 1e-9, cfg.quad_tol);
            fig = figures_from_overlap(phi_w, amp_l, amp_r);
        } catch (const degenerate_window_error&) {
            ++grid.degenerate_skips;
            continue;
        }

        SweepCell cand;
        cand.value = cfg.maximize == Maximize::Probability ? fig.probability
                                                           : fig.fidelity;
        cand.x = x;
        cand.z = z;
        cand.probability = fig.probability;
        cand.fidelity = fig.fidelity;
        cand.purity = fig.purity;
        cand.occupied = true;

        SweepCell& cell = grid.cells[grid.cell_index(row, col)];
        if (cell_wins(cand, cell)) cell = cand;
    }
}

}  // namespace

SweepMap run_postselect_sweep(const OpticalGeometry& geom, double detector_width,
                              const SweepConfig& cfg) {
    geom.validate();
    if (geom.num_slits != 2)
        throw domain_error("the Bloch-sphere sweep is defined for the double slit");
    if (cfg.n_theta < 2 || cfg.n_phi < 1) throw domain_error("grid too small");
    if (!(detector_width >= 0.0)) throw domain_error("detector width must be >= 0");

    const std::vector<double> xs = sweep_x_positions(geom, cfg.x_step);
    const std::vector<double> zs = sweep_z_planes(geom, cfg.z_step);

    int workers = cfg.workers;
    if (workers <= 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min<int>(workers, static_cast<int>(zs.size()));

    std::vector<SweepMap> partials;
    partials.reserve(workers);
    for (int w = 0; w < workers; ++w) partials.emplace_back(cfg.n_theta, cfg.n_phi);

    auto run_worker = [&](int w) {
        for (size_t i = w; i < zs.size(); i += workers)
            scan_plane(geom, detector_width, cfg, xs, zs[i], partials[w]);
    };

    if (workers == 1) {
        run_worker(0);
    } else {
        std::vector<std::thread> threads;
        std::vector<std::exception_ptr> errors(workers);
        for (int w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                try {
                    run_worker(w);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& t : threads) t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    SweepMap result = std::move(partials[0]);
    for (int w = 1; w < workers; ++w) merge_maps(result, partials[w]);
    result.maximize = cfg.maximize;
    result.detector_width = detector_width;
    result.z_step = cfg.z_step;
    result.x_step = cfg.x_step;
    return result;
}

SweepStats stats(const SweepMap& map) {
    if (map.cells.empty()) throw domain_error("empty sweep map");
    SweepStats out;
    StatAccumulator p, f, pur;
    for (int r = 0; r < map.n_theta; ++r) {
        for (int c = 0; c < map.n_phi; ++c) {
            const SweepCell& cell = map.cell(r, c);
            if (!cell.occupied) {
                ++out.unoccupied;
                continue;
            }
            ++out.occupied;
            p.add(cell.probability);
            f.add(cell.fidelity);
            pur.add(cell.purity);
        }
    }
    if (out.occupied == 0) throw domain_error("sweep map has no occupied cells");
    out.probability = p.line();
    out.fidelity = f.line();
    out.purity = pur.line();
    out.degenerate_skips = map.degenerate_skips;
    return out;
}

PovmScanResult run_povm_scan(const OpticalGeometry& geom, double detector_width,
                             int n_theta, int n_chi, double quad_tol) {
    geom.validate();
    if (n_theta < 2 || n_chi < 2) throw domain_error("POVM scan grid too small");

    PovmScanResult out;
    out.chi.resize(n_chi);
    out.p_tot.resize(n_chi);
    out.theta.resize(n_theta);
    out.fidelity_by_theta.assign(n_theta, 1.0);
    out.purity_by_theta.assign(n_theta, 1.0);

    // Overlap values keyed by detector position; the scan revisits the same
    // positions for every Theta, so this cache carries the heavy lifting.
    std::unordered_map<std::int64_t, std::pair<OverlapMatrix, double>> cache;
    const double f = geom.focal_length;
    auto cached = [&](double x) -> const std::pair<OverlapMatrix, double>& {
        std::int64_t key;
        static_assert(sizeof key == sizeof x);
        std::memcpy(&key, &x, sizeof key);
        auto it = cache.find(key);
        if (it == cache.end()) {
            OverlapMatrix m =
                overlap_matrix(geom, {x, detector_width, f}, 1e-9, quad_tol);
            const double diag =
                overlap_diagonal(geom, {x, detector_width, f}, kSlitLeft, 1e-9, quad_tol);
            it = cache.emplace(key, std::make_pair(std::move(m), diag)).first;
        }
        return it->second;
    };

    StatAccumulator p_acc, f_acc, pur_acc;
    const Outcome outcomes[4] = {
        {1, Port::V}, {2, Port::V}, {1, Port::H}, {2, Port::H}};

    for (int m = 0; m < n_chi; ++m) {
        out.chi[m] = -kPi + (m + 0.5) * 2.0 * kPi / n_chi;
        PovmSettings s{0.0, out.chi[m]};
        const DetectorLayout lay = detector_layout(s, geom);
        double p = 0.0;
        for (const Outcome& o : outcomes) p += 0.5 * cached(lay.position(o)).second;
        out.p_tot[m] = p;
        p_acc.add(p);
    }

    for (int i = 0; i < n_theta; ++i) {
        out.theta[i] = 0.25 * kPi * i / (n_theta - 1);
        double worst_f = 1.0;
        double worst_pur = 1.0;
        for (int m = 0; m < n_chi; ++m) {
            PovmSettings s{out.theta[i], out.chi[m]};
            const DetectorLayout lay = detector_layout(s, geom);
            for (const Outcome& o : outcomes) {
                const double x = lay.position(o);
                const OverlapMatrix& phi = cached(x).first;
                const double fv = povm_fidelity_from_overlap(s, o, geom, x, phi);
                const double pv = povm_purity_from_overlap(s, o, phi);
                f_acc.add(fv);
                pur_acc.add(pv);
                worst_f = std::min(worst_f, fv);
                worst_pur = std::min(worst_pur, pv);
            }
        }
        out.fidelity_by_theta[i] = worst_f;
        out.purity_by_theta[i] = worst_pur;
    }

    out.probability = p_acc.line();
    out.fidelity = f_acc.line();
    out.purity = pur_acc.line();
    return out;
}

CompareResult compare_probability_maps(const SweepMap& postselect_map,
                                       const OpticalGeometry& geom,
                                       double detector_width, double quad_tol) {
    CompareResult out;
    out.n_theta = postselect_map.n_theta;
    out.n_phi = postselect_map.n_phi;
    out.povm_wins.assign(static_cast<size_t>(out.n_theta) * out.n_phi, 0);
    out.povm_probability.resize(out.n_phi);

    std::vector<double> p_tot_by_col(out.n_phi);
    for (int c = 0; c < out.n_phi; ++c) {
        PovmSettings s{0.0, postselect_map.phi_center(c)};
        p_tot_by_col[c] = total_probability(s, geom, detector_width, quad_tol);
        out.povm_probability[c] = p_tot_by_col[c];
    }
    // Pole states carry no relative phase; chi = 0 by convention.
    const double p_tot_pole =
        total_probability(PovmSettings{0.0, 0.0}, geom, detector_width, quad_tol);

    for (int r = 0; r < out.n_theta; ++r) {
        const bool pole = postselect_map.pole_row(r);
        for (int c = 0; c < out.n_phi; ++c) {
            const SweepCell& cell = postselect_map.cell(r, c);
            if (!cell.occupied) continue;
            ++out.compared;
            const double povm_p = pole ? p_tot_pole : p_tot_by_col[c];
            if (povm_p > cell.probability) {
                out.povm_wins[static_cast<size_t>(r) * out.n_phi + c] = 1;
                ++out.povm_win_count;
            }
        }
    }
    out.povm_win_fraction =
        out.compared > 0 ? static_cast<double>(out.povm_win_count) / out.compared : 0.0;
    return out;
}

void hammer_aitoff(double theta, double phi, double& hx, double& hy) {
    const double lat = 0.5 * kPi - theta;
    const double half_lon = 0.5 * phi;
    const double denom = std::sqrt(1.0 + std::cos(lat) * std::cos(half_lon));
    hx = 2.0 * std::numbers::sqrt2 * std::cos(lat) * std::sin(half_lon) / denom;
    hy = std::numbers::sqrt2 * std::sin(lat) / denom;
}

namespace {

const char* kCsvHeader =
    "theta_index,phi_index,theta,phi,value,P,F,Pur,x_m,z_m,hammer_x,hammer_y";

void export_csv(const SweepMap& map, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path + " for writing");
    os << kCsvHeader << '\n';
    for (int r = 0; r < map.n_theta; ++r) {
        for (int c = 0; c < map.n_phi; ++c) {
            const SweepCell& cell = map.cell(r, c);
            const double theta = map.theta_center(r);
            const double phi = map.phi_center(c);
            double hx, hy;
            hammer_aitoff(theta, phi, hx, hy);
            os << r << ',' << c << ',' << format_double(theta) << ','
               << format_double(phi) << ',';
            if (cell.occupied) {
                os << format_double(cell.value) << ',' << format_double(cell.probability)
                   << ',' << format_double(cell.fidelity) << ','
                   << format_double(cell.purity) << ',' << format_double(cell.x) << ','
                   << format_double(cell.z);
            } else {
                os << ",,,,,";
            }
            os << ',' << format_double(hx) << ',' << format_double(hy) << '\n';
        }
    }
    if (!os) throw io_error("failed while writing " + path);
}

void export_json(const SweepMap& map, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["n_theta"] = map.n_theta;
    j["n_phi"] = map.n_phi;
    j["maximize"] = maximize_name(map.maximize);
    j["detector_width_m"] = map.detector_width;
    j["z_step_m"] = map.z_step;
    j["x_step_m"] = map.x_step;
    j["degenerate_skips"] = map.degenerate_skips;
    nlohmann::json cells = nlohmann::json::array();
    for (int r = 0; r < map.n_theta; ++r) {
        for (int c = 0; c < map.n_phi; ++c) {
            const SweepCell& cell = map.cell(r, c);
            const double theta = map.theta_center(r);
            const double phi = map.phi_center(c);
            double hx, hy;
            hammer_aitoff(theta, phi, hx, hy);
            nlohmann::json row;
            row["theta_index"] = r;
            row["phi_index"] = c;
            row["theta"] = theta;
            row["phi"] = phi;
            if (cell.occupied) {
                row["value"] = cell.value;
                row["P"] = cell.probability;
                row["F"] = cell.fidelity;
                row["Pur"] = cell.purity;
                row["x_m"] = cell.x;
                row["z_m"] = cell.z;
            }
            row["hammer_x"] = hx;
            row["hammer_y"] = hy;
            cells.push_back(std::move(row));
        }
    }
    j["cells"] = std::move(cells);
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path + " for writing");
    os << j.dump(0) << '\n';
    if (!os) throw io_error("failed while writing " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

SweepMap import_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw io_error("empty map file " + path);
    if (line != kCsvHeader) throw io_error("unrecognized map header in " + path);

    struct Row {
        int r, c;
        SweepCell cell;
    };
    std::vector<Row> rows;
    int max_r = -1, max_c = -1;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 12) throw io_error("malformed map row in " + path);
        Row row;
        row.r = std::stoi(f[0]);
        row.c = std::stoi(f[1]);
        max_r = std::max(max_r, row.r);
        max_c = std::max(max_c, row.c);
        if (!f[4].empty()) {
            row.cell.occupied = true;
            row.cell.value = std::strtod(f[4].c_str(), nullptr);
            row.cell.probability = std::strtod(f[5].c_str(), nullptr);
            row.cell.fidelity = std::strtod(f[6].c_str(), nullptr);
            row.cell.purity = std::strtod(f[7].c_str(), nullptr);
            row.cell.x = std::strtod(f[8].c_str(), nullptr);
            row.cell.z = std::strtod(f[9].c_str(), nullptr);
        }
        rows.push_back(row);
    }
    if (max_r < 0 || max_c < 0) throw io_error("map file has no cells: " + path);
    SweepMap map(max_r + 1, max_c + 1);
    for (const Row& row : rows)
        map.cells[map.cell_index(row.r, row.c)] = row.cell;
    return map;
}

SweepMap import_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    nlohmann::json j;
    is >> j;
    SweepMap map(j.at("n_theta").get<int>(), j.at("n_phi").get<int>());
    map.detector_width = j.value("detector_width_m", 0.0);
    map.z_step = j.value("z_step_m", 0.0);
    map.x_step = j.value("x_step_m", 0.0);
    map.degenerate_skips = j.value("degenerate_skips", 0);
    if (j.value("maximize", "probability") == std::string("fidelity"))
        map.maximize = Maximize::Fidelity;
    for (const auto& row : j.at("cells")) {
        const int r = row.at("theta_index").get<int>();
        const int c = row.at("phi_index").get<int>();
        if (!row.contains("value")) continue;
        SweepCell cell;
        cell.occupied = true;
        cell.value = row.at("value").get<double>();
        cell.probability = row.at("P").get<double>();
        cell.fidelity = row.at("F").get<double>();
        cell.purity = row.at("Pur").get<double>();
        cell.x = row.at("x_m").get<double>();
        cell.z = row.at("z_m").get<double>();
        map.cells[map.cell_index(r, c)] = cell;
    }
    return map;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void export_map(const SweepMap& map, MapFormat format, const std::string& path) {
    if (format == MapFormat::Csv)
        export_csv(map, path);
    else
        export_json(map, path);
}

SweepMap import_map(const std::string& path) {
    return ends_with(path, ".json") ? import_json(path) : import_csv(path);
}

std::string map_digest(const SweepMap& map) {
    std::string out;
    out.reserve(map.cells.size() * 7 * sizeof(double) + 64);
    auto put = [&out](const void* p, size_t n) {
        out.append(static_cast<const char*>(p), n);
    };
    put(&map.n_theta, sizeof map.n_theta);
    put(&map.n_phi, sizeof map.n_phi);
    put(&map.degenerate_skips, sizeof map.degenerate_skips);
    for (const SweepCell& c : map.cells) {
        const char occ = c.occupied ? 1 : 0;
        put(&occ, 1);
        if (!c.occupied) continue;
        put(&c.value, sizeof c.value);
        put(&c.x, sizeof c.x);
        put(&c.z, sizeof c.z);
        put(&c.probability, sizeof c.probability);
        put(&c.fidelity, sizeof c.fidelity);
        put(&c.purity, sizeof c.purity);
    }
    return out;
}

}  // namespace rsp
