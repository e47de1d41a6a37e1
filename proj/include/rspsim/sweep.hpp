#ifndef RSPSIM_SWEEP_HPP
#define RSPSIM_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rspsim/geometry.hpp"
#include "rspsim/postselect.hpp"
#include "rspsim/povm.hpp"

namespace rsp {

enum class Maximize { Probability, Fidelity };

const char* maximize_name(Maximize m);

struct SweepConfig {
    int n_theta = 300;
    int n_phi = 600;
    double x_step = 20e-6;   // detector scan step; the range is [-pi f/ka, pi f/ka]
    double z_step = 1e-6;    // 1 um full resolution, 100 um coarse preset
    Maximize maximize = Maximize::Probability;
    int workers = 0;         // 0: hardware concurrency
    double quad_tol = 1e-9;
};

struct SweepCell {
    double value = 0.0;
    double x = 0.0;
    double z = 0.0;
    double probability = 0.0;
    double fidelity = 0.0;
    double purity = 0.0;
    bool occupied = false;
};

// Bloch-sphere grid of best figure values. Pixel (i, j) covers
// theta in [i, i+1) * pi/n_theta, phi in -pi + [j, j+1) * 2pi/n_phi.
// The two pole rows each hold one physical state: they are stored as a
// single logical cell (column 0) and fanned out across columns on export.
struct SweepMap {
    int n_theta = 0;
    int n_phi = 0;
    std::vector<SweepCell> cells;
    std::int64_t degenerate_skips = 0;

    // evaluation context, recorded for export
    Maximize maximize = Maximize::Probability;
    double detector_width = 0.0;
    double z_step = 0.0;
    double x_step = 0.0;

    SweepMap() = default;
    SweepMap(int nt, int np)
        : n_theta(nt), n_phi(np), cells(static_cast<size_t>(nt) * np) {}

    bool pole_row(int row) const { return row == 0 || row == n_theta - 1; }
    int cell_index(int row, int col) const {
        return row * n_phi + (pole_row(row) ? 0 : col);
    }
    const SweepCell& cell(int row, int col) const { return cells[cell_index(row, col)]; }

    double theta_center(int row) const;
    double phi_center(int col) const;
};

// True if `a` wins the override: strictly larger value, ties broken toward
// smaller z then smaller x. Total order, so merges commute.
bool cell_wins(const SweepCell& a, const SweepCell& b);

// Cell-wise max-merge of `other` into `into` (grids must match).
void merge_maps(SweepMap& into, const SweepMap& other);

// x positions of the detector scan: symmetric around 0, spacing cfg.x_step,
// spanning [-pi f/ka, pi f/ka].
std::vector<double> sweep_x_positions(const OpticalGeometry& geom, double x_step);

// z planes: f + n * z_step up to and including 2f.
std::vector<double> sweep_z_planes(const OpticalGeometry& geom, double z_step);

// The Bloch-sphere maximization over the full (x, z) scan. Deterministic for
// any worker count: workers own disjoint plane sets and partial grids merge
// under the total order above.
SweepMap run_postselect_sweep(const OpticalGeometry& geom, double detector_width,
                              const SweepConfig& cfg);

struct StatLine {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double stddev = 0.0;
};

struct SweepStats {
    StatLine probability;
    StatLine fidelity;
    StatLine purity;
    std::int64_t occupied = 0;    // over the exported n_theta x n_phi grid
    std::int64_t unoccupied = 0;
    std::int64_t degenerate_skips = 0;
};

// Population statistics over occupied cells of the exported grid (pole-row
// values count once per column, as they are plotted).
SweepStats stats(const SweepMap& map);

// Figures of merit of the generalized measurement over a settings grid:
// Theta in [0, pi/4] (n_theta points, inclusive) x chi (n_chi midpoints of
// [-pi, pi)), all four outcomes.
struct PovmScanResult {
    std::vector<double> chi;          // scan phases
    std::vector<double> p_tot;        // P_tot per chi
    std::vector<double> theta;        // wave-plate grid
    std::vector<double> fidelity_by_theta;  // worst case over chi and outcomes
    std::vector<double> purity_by_theta;
    StatLine probability;  // over the chi scan
    StatLine fidelity;     // over (theta, chi, outcome)
    StatLine purity;
};

PovmScanResult run_povm_scan(const OpticalGeometry& geom, double detector_width,
                             int n_theta, int n_chi, double quad_tol = 1e-9);

struct CompareResult {
    int n_theta = 0;
    int n_phi = 0;
    std::vector<std::uint8_t> povm_wins;  // exported-grid winner per cell
    std::vector<double> povm_probability; // P_tot per phi column
    std::int64_t compared = 0;
    std::int64_t povm_win_count = 0;
    double povm_win_fraction = 0.0;
};

// Per-pixel comparison of the postselection map's companion probability
// against the POVM total probability for the settings preparing that state.
CompareResult compare_probability_maps(const SweepMap& postselect_map,
                                       const OpticalGeometry& geom,
                                       double detector_width,
                                       double quad_tol = 1e-9);

// Hammer-Aitoff projection of (theta colatitude, phi longitude).
void hammer_aitoff(double theta, double phi, double& hx, double& hy);

enum class MapFormat { Csv, Json };

// Row-major cell dump; unoccupied cells keep their coordinate columns and
// leave the figure columns empty. Bit-stable ordering and %.17g formatting.
void export_map(const SweepMap& map, MapFormat format, const std::string& path);
SweepMap import_map(const std::string& path);

// Canonical byte string of the map payload (used for determinism checks).
std::string map_digest(const SweepMap& map);

}  // namespace rsp

#endif
