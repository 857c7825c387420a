// All pipeline tunables in one place, with defaults matching the published
// analysis. Loadable from a JSON file; every scalar field can be overridden
// by a CLI flag of the same name. Unknown keys are rejected.
#pragma once

#include "spectool/correlation.hpp"
#include "spectool/fitting.hpp"
#include "spectool/lsq.hpp"
#include "spectool/qc.hpp"
#include "spectool/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spectool::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    // PLE / PL peak search and vetting
    int ple_window = peaks::kPleWindow;
    int pl_window = peaks::kPlWindow;
    double ple_residual_max = peaks::kPleVet.residual_max;
    double ple_min_height = peaks::kPleVet.min_height;
    double pl_residual_max = peaks::kPlVet.residual_max;
    double pl_min_height = peaks::kPlVet.min_height;

    // selection criteria
    double min_count_rate = 8000.0;
    double stability_max = 0.1;
    double g2_max = 0.5;
    double fit_residual_max = 0.26;
    double bleach_ratio = 3.5;
    double stability_bin = 0.5;
    double rep_period = 12.5e-9;
    int g2_side_peaks = 3;

    // scan detection
    double scan_step = 0.1;  // um per pixel
    int neighbor_offset = 6;
    double brightness_ratio = 4.0;

    // AFM
    double flake_threshold = 2.0;  // nm
    double pixel_size = 1.0;       // nm per pixel

    // correlation
    double density_window = 0.050;
    double density_step = 0.005;
    double slice_width = 0.040;
    double slice_step = 0.010;
    double max_detuning = 0.55;
    bool raw_density = false;  // default: normalize by emitter count

    // ZPL restriction window (applied when requested)
    double zpl_window_lo = 2.115;
    double zpl_window_hi = 2.232;

    // least-squares engine
    int fit_max_iter = 200;
    double fit_tol_cost = 1e-10;
    double fit_tol_step = 1e-10;
    double fit_damping_init = 1e-3;
    double fit_damping_cap = 1e10;

    // simulation
    std::vector<std::pair<double, double>> sim_modes = {{0.165, 25.0}, {0.190, 2.0}, {0.100, 2.0}};
    double sim_jitter = 0.017;
    double sim_range_lo = 2.34;
    double sim_range_hi = 2.88;
    int sim_duplication = 7;
    int sim_zpl_count = 152;

    // synthetic spectra written by `simulate --spectra`
    double synth_sigma = 0.015;   // eV
    double synth_noise = 0.0;     // additive uniform noise amplitude
    double synth_decay = 0.85;    // per placed line amplitude factor
    double grid_lo_nm = 430.0;
    double grid_hi_nm = 530.0;
    double grid_step_nm = 1.0;

    // global
    std::uint64_t seed = 1;
    int jobs = 0;  // 0 = hardware concurrency

    // views onto the per-module parameter structs
    lsq::FitOptions fit_options() const;
    fitting::PleParams ple_params() const;
    qc::SelectionParams qc_params() const;
    qc::DetectParams detect_params() const;
    correlation::DensityParams density_params() const;
    correlation::HeatmapParams heatmap_params() const;
    sim::SimConfig sim_config() const;

    // Throws ConfigError when any module precondition is violated.
    void validate() const;
};

// Merge a JSON config file over `cfg`. Unknown keys raise ConfigError.
void load_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

// "e:w,e:w,..." used by the --sim_modes flag.
std::vector<std::pair<double, double>> parse_modes(const std::string& text);

}  // namespace spectool::cli
