#include "spectool/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace spectool::grid {

int reflect_index(int i, int n) {
    // period-2n reflection, edge pixel repeated: (d c b a | a b c d | d c b a)
    if (n == 1) return 0;
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

std::vector<double> median_filter(const std::vector<double>& pixels, int rows, int cols,
                                  int size) {
    if (rows <= 0 || cols <= 0 || pixels.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("median_filter: bad grid dimensions");
    if (size < 1 || size % 2 == 0)
        throw std::invalid_argument("median_filter: size must be odd and >= 1");
    const int half = size / 2;
    std::vector<double> out(pixels.size());
    std::vector<double> window;
    window.reserve(static_cast<std::size_t>(size) * size);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            window.clear();
            for (int dr = -half; dr <= half; ++dr)
                for (int dc = -half; dc <= half; ++dc)
                    window.push_back(pixels[static_cast<std::size_t>(reflect_index(r + dr, rows)) * cols +
                                            reflect_index(c + dc, cols)]);
            auto mid = window.begin() + window.size() / 2;
            std::nth_element(window.begin(), mid, window.end());
            out[static_cast<std::size_t>(r) * cols + c] = *mid;
        }
    }
    return out;
}

std::vector<PixelSet> connected_components_8(const std::vector<char>& mark, int rows, int cols) {
    if (rows <= 0 || cols <= 0 || mark.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("connected_components_8: bad grid dimensions");
    std::vector<char> seen(mark.size(), 0);
    std::vector<PixelSet> groups;
    std::vector<std::pair<int, int>> stack;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * cols + c;
            if (!mark[idx] || seen[idx]) continue;
            PixelSet group;
            stack.clear();
            stack.emplace_back(r, c);
            seen[idx] = 1;
            while (!stack.empty()) {
                auto [pr, pc] = stack.back();
                stack.pop_back();
                group.emplace_back(pr, pc);
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int nr = pr + dr, nc = pc + dc;
                        if (nr < 0 || nr >= rows || nc < 0 || nc >= cols) continue;
                        const std::size_t nidx = static_cast<std::size_t>(nr) * cols + nc;
                        if (mark[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.emplace_back(nr, nc);
                        }
                    }
                }
            }
            std::sort(group.begin(), group.end());
            groups.push_back(std::move(group));
        }
    }
    return groups;
}

}  // namespace spectool::grid
