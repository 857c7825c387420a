// Command implementations behind the spectool binary. Each run_* function
// does the full file-in / file-out work of one subcommand and returns a
// process exit code (0 ok, 1 input error; config errors throw ConfigError
// and map to 2 in the frontend).
#pragma once

#include "spectool/config.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace spectool::cli {

// Emitter detection on one confocal scan CSV; spots as a JSON array on `out`.
int run_detect(const PipelineConfig& cfg, const std::filesystem::path& scan_file,
               std::ostream& out);

// Three-criterion selection over a dataset directory (manifest.csv inside);
// writes qc_report.csv into out_dir. Missing per-emitter files mark the
// affected criterion not-evaluable and the run continues.
int run_qc(const PipelineConfig& cfg, const std::filesystem::path& dataset_dir,
           const std::filesystem::path& out_dir);

struct FitCommandOptions {
    bool apply_zpl_window = false;        // keep only ZPLs inside the config window
    std::filesystem::path qc_report;      // optional: restrict to emitters that passed qc
};

// Peak search + multi-Gaussian fit per emitter; writes transitions.csv.
int run_fit(const PipelineConfig& cfg, const std::filesystem::path& dataset_dir,
            const std::filesystem::path& out_dir, const FitCommandOptions& opts = {});

// Density + heatmap from a transitions file; writes density.csv and
// heatmap.csv (and zpl_density.csv with from_zpl).
int run_correlate(const PipelineConfig& cfg, const std::filesystem::path& transitions_file,
                  const std::filesystem::path& out_dir, bool from_zpl = false);

struct SimulateCommandOptions {
    bool spectra = false;                 // also write a synthetic dataset for the fit pipeline
    std::filesystem::path zpl_file;       // optional measured ZPL list (eV, one per line)
};

// Monte Carlo dataset; writes transitions.csv (+ dataset/ with --spectra).
int run_simulate(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                 const SimulateCommandOptions& opts = {});

// Flake morphometry on one AFM height map CSV; writes flakes.csv and
// afm_summary.json.
int run_afm(const PipelineConfig& cfg, const std::filesystem::path& heightmap_file,
            const std::filesystem::path& out_dir);

// Index-ordered parallel map; jobs = 0 uses hardware concurrency.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace spectool::cli
