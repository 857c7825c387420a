// Sliding-window densities of transition spacings, conditional subsets and
// the slicing-interval x density-interval heatmap, plus Gaussian peak
// extraction from a density curve.
#pragma once

#include "spectool/fitting.hpp"

#include <vector>

namespace spectool::correlation {

struct DensityMap {
    std::vector<double> centers;  // eV, uniformly spaced
    std::vector<double> values;   // counts (or per-emitter normalized)
    double window_width = 0.0;
    double step = 0.0;
};

struct HeatMap {
    std::vector<double> slice_centers;    // y-axis: slicing interval centers
    std::vector<double> density_centers;  // x-axis: density window centers
    std::vector<std::vector<double>> matrix;  // one row per slice center
    double slice_width = 0.0;
    double density_width = 0.0;
};

struct DensityParams {
    double window = 0.050;       // density interval width
    double step = 0.005;
    double max_center = 0.55;    // centers span [0, max_center]
};

struct HeatmapParams {
    double slice_width = 0.040;
    double slice_step = 0.010;
    double density_width = 0.050;
    double density_step = 0.005;
    double max_center = 0.55;
    bool normalize_rows = true;  // divide each row by its subset's emitter count
};

// Pool all pairwise differences and count them per half-open window
// [c - w/2, c + w/2) on a uniform grid of centers from 0 to max_center.
DensityMap spacing_density(const std::vector<fitting::TransitionSet>& sets,
                           const DensityParams& params = {});

// Same windowing over the per-emitter distances transition - zpl.
DensityMap zpl_distance_density(const std::vector<fitting::TransitionSet>& sets,
                                const DensityParams& params = {});

// Sets with at least one pairwise difference inside
// [center - width/2, center + width/2).
std::vector<fitting::TransitionSet> conditional_subset(
    const std::vector<fitting::TransitionSet>& sets, double interval_center,
    double interval_width);

// One spacing density per slicing interval, over the full detuning range.
HeatMap build_heatmap(const std::vector<fitting::TransitionSet>& sets,
                      const HeatmapParams& params = {});

struct DensityPeaks {
    std::vector<fitting::GaussianComponent> components;  // amplitudes in density units
    bool fewer_than_expected = false;
};

// Treat the density as a spectrum and run the peak preselection plus
// multi-Gaussian fit on it.
DensityPeaks fit_density_peaks(const DensityMap& map, int expected_count, int window = 8,
                               const lsq::FitOptions& options = {});

}  // namespace spectool::correlation
