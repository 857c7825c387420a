// AFM height-map flake analysis: plane tilt removal by two line fits,
// threshold segmentation into 8-connected flakes, and per-flake / aggregate
// morphometry.
#pragma once

#include "spectool/grid.hpp"

#include <vector>

namespace spectool::afm {

struct HeightMap {
    std::vector<double> pixels;  // row-major heights in nm
    int rows = 0;
    int cols = 0;
    double pixel_size_nm = 1.0;

    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }
    void validate() const;
};

// Interlayer spacing along the stacking axis (3.33 Angstrom).
inline constexpr double kLayerThicknessNm = 0.333;

struct FlakeStats {
    int pixel_count = 0;
    double mean_height_nm = 0.0;
    double area_nm2 = 0.0;
    double equiv_diameter_nm = 0.0;  // 2 * sqrt(area / pi), circular-flake assumption
    double layers = 0.0;             // mean height / 0.333 nm
};

struct AggregateStats {
    struct Moments {
        double mean = 0.0;
        double std = 0.0;  // population (divisor N)
        double min = 0.0;
        double max = 0.0;
    };
    int count = 0;
    Moments height_nm;
    Moments layers;
    Moments diameter_nm;
};

// Remove the sample tilt: least-squares line over column means vs column
// index subtracted per column, then the same along rows, then shift so the
// minimum is 0. Needs at least 2 rows and 2 columns.
HeightMap correct_tilt(const HeightMap& map);

// Pixels with height >= threshold grouped by 8-connectivity.
std::vector<grid::PixelSet> segment_flakes(const HeightMap& map, double threshold_nm = 2.0);

FlakeStats flake_stats(const HeightMap& map, const grid::PixelSet& flake);

// Population statistics over a non-empty flake list.
AggregateStats aggregate_stats(const std::vector<FlakeStats>& flakes);

}  // namespace spectool::afm
