#ifndef RSPSIM_RECIPES_HPP
#define RSPSIM_RECIPES_HPP

#include <string>

#include "rspsim/config.hpp"
#include "rspsim/postselect.hpp"

namespace rsp {

// Joint recovery of a set of target states measured along one detection
// plane. Each target's exact placements (x, z) are isolated points; a table
// generated by scanning x at a fixed plane leaves one placement per row
// clustered around that plane (smeared only by the rounding of the printed
// amplitudes). The consensus cluster pins down placements that a row-by-row
// probability ranking cannot.
struct RowPlacement {
    bool matched = false;
    double x = 0.0;
    double z = 0.0;
    double angle = 0.0;
    double probability = 0.0;
};

struct CommonPlaneInversion {
    bool found = false;
    double plane_z = 0.0;      // consensus plane (median of the row solutions)
    double spread = 0.0;       // largest |z_row - plane_z| in the cluster
    std::vector<RowPlacement> rows;
};

CommonPlaneInversion invert_rows_common_plane(const OpticalGeometry& geom,
                                              const std::vector<PureKet>& targets,
                                              double detector_width,
                                              double cluster_tol_rel = 4e-3);

// JSON-returning command backends. Paths for data files come from
// cfg.out_path (with sensible defaults when empty).
std::string run_sweep_cmd(const RunConfig& cfg);
std::string run_table2_cmd(const RunConfig& cfg);
std::string run_table3_cmd(const RunConfig& cfg);
std::string run_compare_cmd(const RunConfig& cfg);
std::string run_qudit_cmd(const RunConfig& cfg, const std::string& target_spec);
std::string run_map_stats_cmd(const std::string& map_path);

}  // namespace rsp

#endif
