// Small 2-D raster helpers shared by the scan-detection and AFM modules:
// reflect-padded median filtering and 8-connected component labeling.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace spectool::grid {

using PixelSet = std::vector<std::pair<int, int>>;  // (row, col)

// Reflect index into [0, n): -1 -> 0, n -> n-1 (mirror including the edge).
int reflect_index(int i, int n);

// Median over the size x size neighborhood with reflect border handling.
// size must be odd and >= 1.
std::vector<double> median_filter(const std::vector<double>& pixels, int rows, int cols,
                                  int size = 3);

// Group marked pixels (mark[r*cols+c] != 0) into 8-connected components.
// Components are emitted in row-major order of their first pixel; pixels
// within a component are sorted row-major.
std::vector<PixelSet> connected_components_8(const std::vector<char>& mark, int rows, int cols);

}  // namespace spectool::grid
