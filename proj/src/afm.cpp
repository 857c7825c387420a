#include "spectool/afm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spectool::afm {

void HeightMap::validate() const {
    if (rows <= 0 || cols <= 0 || pixels.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("HeightMap: bad dimensions");
    if (!(pixel_size_nm > 0.0))
        throw std::invalid_argument("HeightMap: pixel size must be > 0");
}

namespace {

// least-squares line y = a*i + b over (0..n-1, y_i)
std::pair<double, double> fit_line(const std::vector<double>& y) {
    const auto n = static_cast<double>(y.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const auto x = static_cast<double>(i);
        sx += x;
        sy += y[i];
        sxx += x * x;
        sxy += x * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double a = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double b = (sy - a * sx) / n;
    return {a, b};
}

}  // namespace

HeightMap correct_tilt(const HeightMap& map) {
    map.validate();
    if (map.rows < 2 || map.cols < 2)
        throw std::invalid_argument("correct_tilt: need at least 2 rows and 2 columns");
    HeightMap out = map;

    std::vector<double> col_means(static_cast<std::size_t>(map.cols), 0.0);
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c) col_means[static_cast<std::size_t>(c)] += out.at(r, c);
    for (double& v : col_means) v /= static_cast<double>(map.rows);
    {
        auto [a, b] = fit_line(col_means);
        for (int r = 0; r < map.rows; ++r)
            for (int c = 0; c < map.cols; ++c)
                out.pixels[static_cast<std::size_t>(r) * map.cols + c] -= a * c + b;
    }

    std::vector<double> row_means(static_cast<std::size_t>(map.rows), 0.0);
    for (int r = 0; r < map.rows; ++r)
        for (int c = 0; c < map.cols; ++c) row_means[static_cast<std::size_t>(r)] += out.at(r, c);
    for (double& v : row_means) v /= static_cast<double>(map.cols);
    {
        auto [a, b] = fit_line(row_means);
        for (int r = 0; r < map.rows; ++r)
            for (int c = 0; c < map.cols; ++c)
                out.pixels[static_cast<std::size_t>(r) * map.cols + c] -= a * r + b;
    }

    const double mn = *std::min_element(out.pixels.begin(), out.pixels.end());
    for (double& v : out.pixels) v -= mn;
    return out;
}

std::vector<grid::PixelSet> segment_flakes(const HeightMap& map, double threshold_nm) {
    map.validate();
    if (!(threshold_nm > 0.0))
        throw std::invalid_argument("segment_flakes: threshold must be > 0");
    std::vector<char> mark(map.pixels.size(), 0);
    for (std::size_t i = 0; i < map.pixels.size(); ++i)
        if (map.pixels[i] >= threshold_nm) mark[i] = 1;
    return grid::connected_components_8(mark, map.rows, map.cols);
}

FlakeStats flake_stats(const HeightMap& map, const grid::PixelSet& flake) {
    map.validate();
    if (flake.empty()) throw std::invalid_argument("flake_stats: empty pixel set");
    FlakeStats st;
    st.pixel_count = static_cast<int>(flake.size());
    double sum = 0.0;
    for (auto [r, c] : flake) sum += map.at(r, c);
    st.mean_height_nm = sum / static_cast<double>(flake.size());
    st.area_nm2 = static_cast<double>(flake.size()) * map.pixel_size_nm * map.pixel_size_nm;
    st.equiv_diameter_nm = 2.0 * std::sqrt(st.area_nm2 / std::numbers::pi);
    st.layers = st.mean_height_nm / kLayerThicknessNm;
    return st;
}

AggregateStats aggregate_stats(const std::vector<FlakeStats>& flakes) {
    if (flakes.empty()) throw std::invalid_argument("aggregate_stats: empty flake list");
    auto moments = [&](auto&& get) {
        AggregateStats::Moments m;
        double sum = 0.0;
        m.min = get(flakes.front());
        m.max = m.min;
        for (const auto& f : flakes) {
            const double v = get(f);
            sum += v;
            m.min = std::min(m.min, v);
            m.max = std::max(m.max, v);
        }
        m.mean = sum / static_cast<double>(flakes.size());
        double var = 0.0;
        for (const auto& f : flakes) {
            const double d = get(f) - m.mean;
            var += d * d;
        }
        m.std = std::sqrt(var / static_cast<double>(flakes.size()));
        return m;
    };
    AggregateStats out;
    out.count = static_cast<int>(flakes.size());
    out.height_nm = moments([](const FlakeStats& f) { return f.mean_height_nm; });
    out.layers = moments([](const FlakeStats& f) { return f.layers; });
    out.diameter_nm = moments([](const FlakeStats& f) { return f.equiv_diameter_nm; });
    return out;
}

}  // namespace spectool::afm
