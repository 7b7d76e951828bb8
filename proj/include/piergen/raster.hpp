#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "piergen/drawing.hpp"

namespace piergen {

struct RasterConfig {
    int width_px = 1600;
    int height_px = 1200;
    int stroke_width_px = 2;
    double margin_fraction = 0.05;

    void validate() const;
};

/// 8-bit grayscale image (0 = black ink, 255 = white background) plus its PNG encoding.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, top row first
    std::string png;

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Uniform scale + translation mapping drawing millimeters to pixel space.
/// Drawing y points up; pixel rows grow downward.
struct ViewTransform {
    double scale = 1.0;
    double center_x = 0.0, center_y = 0.0;  // drawing-space centre of the bounds
    int width = 0, height = 0;

    double px(double x) const { return (x - center_x) * scale + width / 2.0; }
    double py(double y) const { return height / 2.0 - (y - center_y) * scale; }

    /// Fits `b` inside the margins. Only a bounds with neither width nor height
    /// is rejected (DegenerateBounds); a zero-height line still fits by width.
    static ViewTransform fit(const Bounds& b, const RasterConfig& cfg);
};

/// Renders primitives, leader geometry and annotation digits of one view.
Raster rasterize(const View& view, const RasterConfig& cfg);
Raster rasterize(const Drawing& d, ViewId view, const RasterConfig& cfg);

/// The three views on one sheet: front upper-left, side to its right,
/// top below the front view.
View compose_sheet(const Drawing& d);
Raster rasterize_sheet(const Drawing& d, const RasterConfig& cfg);

/// PNG (color type 0, bit depth 8, no interlace) of a grayscale buffer.
std::string encode_png_gray(int width, int height, const std::vector<std::uint8_t>& pixels);

}  // namespace piergen
