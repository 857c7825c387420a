#include "spectool/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spectool::correlation {

namespace {

std::vector<double> uniform_centers(double step, double max_center) {
    if (!(step > 0.0) || !(max_center > 0.0))
        throw std::invalid_argument("density grid: step and max_center must be > 0");
    std::vector<double> centers;
    const auto n = static_cast<std::size_t>(std::floor(max_center / step + 1e-9)) + 1;
    centers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) centers.push_back(static_cast<double>(i) * step);
    return centers;
}

DensityMap windowed_counts(const std::vector<double>& pool, const DensityParams& params) {
    if (!(params.window > 0.0))
        throw std::invalid_argument("density window must be > 0");
    DensityMap map;
    map.window_width = params.window;
    map.step = params.step;
    map.centers = uniform_centers(params.step, params.max_center);
    map.values.assign(map.centers.size(), 0.0);
    for (double d : pool) {
        for (std::size_t i = 0; i < map.centers.size(); ++i) {
            const double lo = map.centers[i] - params.window / 2.0;
            const double hi = map.centers[i] + params.window / 2.0;
            if (d >= lo && d < hi) map.values[i] += 1.0;
        }
    }
    return map;
}

}  // namespace

DensityMap spacing_density(const std::vector<fitting::TransitionSet>& sets,
                           const DensityParams& params) {
    std::vector<double> pool;
    for (const auto& s : sets)
        pool.insert(pool.end(), s.pairwise_diffs.begin(), s.pairwise_diffs.end());
    return windowed_counts(pool, params);
}

DensityMap zpl_distance_density(const std::vector<fitting::TransitionSet>& sets,
                                const DensityParams& params) {
    std::vector<double> pool;
    for (const auto& s : sets)
        for (double t : s.transitions) pool.push_back(t - s.zpl_energy);
    return windowed_counts(pool, params);
}

std::vector<fitting::TransitionSet> conditional_subset(
    const std::vector<fitting::TransitionSet>& sets, double interval_center,
    double interval_width) {
    if (!(interval_width > 0.0))
        throw std::invalid_argument("conditional_subset: interval width must be > 0");
    const double lo = interval_center - interval_width / 2.0;
    const double hi = interval_center + interval_width / 2.0;
    std::vector<fitting::TransitionSet> out;
    for (const auto& s : sets) {
        const bool hit = std::any_of(s.pairwise_diffs.begin(), s.pairwise_diffs.end(),
                                     [&](double d) { return d >= lo && d < hi; });
        if (hit) out.push_back(s);
    }
    return out;
}

HeatMap build_heatmap(const std::vector<fitting::TransitionSet>& sets,
                      const HeatmapParams& params) {
    HeatMap hm;
    hm.slice_width = params.slice_width;
    hm.density_width = params.density_width;
    hm.slice_centers = uniform_centers(params.slice_step, params.max_center);

    DensityParams dp{params.density_width, params.density_step, params.max_center};
    hm.density_centers = uniform_centers(dp.step, dp.max_center);

    for (double sc : hm.slice_centers) {
        const auto subset = conditional_subset(sets, sc, params.slice_width);
        DensityMap row = spacing_density(subset, dp);
        if (params.normalize_rows && !subset.empty()) {
            const double n = static_cast<double>(subset.size());
            for (double& v : row.values) v /= n;
        }
        hm.matrix.push_back(std::move(row.values));
    }
    return hm;
}

DensityPeaks fit_density_peaks(const DensityMap& map, int expected_count, int window,
                               const lsq::FitOptions& options) {
    DensityPeaks out;
    const double mx = map.values.empty()
                          ? 0.0
                          : *std::max_element(map.values.begin(), map.values.end());
    if (!(mx > 0.0)) {
        out.fewer_than_expected = expected_count > 0;
        return out;
    }
    std::vector<double> norm(map.values.size());
    for (std::size_t i = 0; i < norm.size(); ++i) norm[i] = map.values[i] / mx;
    core::Spectrum s(map.centers, norm, core::AxisUnit::ElectronVolt,
                     core::IntensityKind::Normalized);

    const auto candidates = peaks::preselect_peaks(s, window);
    if (candidates.empty()) {
        out.fewer_than_expected = expected_count > 0;
        return out;
    }
    const fitting::MultiGaussFit fit = fitting::multi_gauss_fit(s, candidates, options);
    for (const auto& c : fit.components)
        out.components.push_back({c.amplitude * mx, c.center, c.sigma});
    out.fewer_than_expected = static_cast<int>(out.components.size()) < expected_count;
    return out;
}

}  // namespace spectool::correlation
