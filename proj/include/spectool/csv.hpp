// Flat-file formats: two-column spectra, row-major numeric grids, count
// traces, coincidence histograms, transition sets, density/heatmap matrices
// and the dataset manifest. Doubles are written in shortest round-trip form,
// so read-then-rewrite is byte-identical.
#pragma once

#include "spectool/core.hpp"
#include "spectool/correlation.hpp"
#include "spectool/fitting.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectool::io {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shortest decimal form that parses back to the same double.
std::string fmt_double(double v);
double parse_double(const std::string& s);
std::vector<std::string> split(const std::string& line, char sep);

// Spectrum files: one header line naming the axis unit
// ("wavelength_nm,intensity" or "energy_eV,intensity"), then axis,value rows.
core::Spectrum read_spectrum(const std::filesystem::path& path);
void write_spectrum(const std::filesystem::path& path, const core::Spectrum& s);

// Row-major numeric grid with comma-separated columns; must be rectangular.
struct GridData {
    std::vector<double> values;
    int rows = 0;
    int cols = 0;
};
GridData read_grid(const std::filesystem::path& path);
void write_grid(const std::filesystem::path& path, const std::vector<double>& values, int rows,
                int cols);

// Count trace: "bin_width_s,<value>" header, then one count per line.
core::CountTrace read_trace(const std::filesystem::path& path);
void write_trace(const std::filesystem::path& path, const core::CountTrace& t);

// g2 histogram: "bin_width_s,<value>" header, "delay_s,coincidences" header,
// then delay,value rows.
core::G2Histogram read_g2(const std::filesystem::path& path);
void write_g2(const std::filesystem::path& path, const core::G2Histogram& g);

// Transition sets: "emitter_id,zpl_eV,transitions_eV" with the transitions
// semicolon-joined. Pairwise differences are rebuilt on read. With `skipped`
// set, malformed rows are skipped and counted instead of raising.
std::vector<fitting::TransitionSet> read_transitions(const std::filesystem::path& path,
                                                     std::size_t* skipped = nullptr);
void write_transitions(const std::filesystem::path& path,
                       const std::vector<fitting::TransitionSet>& sets);

void write_density(const std::filesystem::path& path, const correlation::DensityMap& map);
void write_heatmap(const std::filesystem::path& path, const correlation::HeatMap& map);

// Dataset manifest: per-emitter file paths relative to the manifest
// directory; empty fields mean the measurement is absent.
struct ManifestEntry {
    int id = -1;
    std::string ple, pl, trace, g2, opt_x, opt_y, saturation;
};
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

// Load the files a manifest entry points at (base = manifest directory).
core::EmitterRecord load_record(const std::filesystem::path& base, const ManifestEntry& entry);

}  // namespace spectool::io
