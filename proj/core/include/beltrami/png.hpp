#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beltrami/grid.hpp"

namespace beltrami {

/// Minimal PNG writer (8-bit RGB, zlib-deflated). rgb is row-major,
/// 3 bytes per pixel, top row first.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

enum class HeatComponent { Abs, Real, Imag };

/// Raster heat map of one component of the grid (diverging colormap,
/// symmetric range for signed components).
void render_heat_map(const ComplexGrid& g, HeatComponent component,
                     const std::string& path);

/// Heat map of caller-provided real values laid out like the grid.
void render_heat_map(const GridSpec& spec, const std::vector<double>& values,
                     const std::string& path);

/// Coordinate-line image of a planar map: the images of `lines` horizontal
/// and vertical lines under phi (given as its value grid), drawn into a
/// square raster of side `pixels`.
void render_deformed_grid(const ComplexGrid& phi_values, int lines, int pixels,
                          const std::string& path);

}  // namespace beltrami
