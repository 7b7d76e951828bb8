#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "piergen/schema.hpp"

namespace piergen {

struct Point {
    std::int64_t x = 0;
    std::int64_t y = 0;
    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

struct LineSegment {
    Point a;
    Point b;
    friend bool operator==(const LineSegment&, const LineSegment&) = default;
};

struct Circle {
    Point center;
    std::int64_t radius = 0;
    friend bool operator==(const Circle&, const Circle&) = default;
};

/// Closed polylines keep first != last; closure is implicit.
struct Polyline {
    std::vector<Point> points;
    bool closed = false;
    friend bool operator==(const Polyline&, const Polyline&) = default;
};

using Shape = std::variant<LineSegment, Circle, Polyline>;

enum class Layer { CapBeam, PierColumn, PileCap, Piles, Bearings, Dimensions };
inline constexpr Layer kAllLayers[] = {Layer::CapBeam, Layer::PierColumn, Layer::PileCap,
                                       Layer::Piles,   Layer::Bearings,   Layer::Dimensions};
std::string_view to_string(Layer layer);
std::optional<Layer> parse_layer(std::string_view name);

struct Primitive {
    std::string id;
    Shape shape;
    Layer layer = Layer::Dimensions;

    /// Circle or closed polyline.
    bool is_closed_contour() const;
    friend bool operator==(const Primitive&, const Primitive&) = default;
};

/// Axis-aligned box; empty until the first point is added.
struct Bounds {
    std::int64_t min_x = 0, min_y = 0, max_x = 0, max_y = 0;
    bool empty = true;

    void add(Point p);
    void add(const Bounds& other);
    std::int64_t width() const { return empty ? 0 : max_x - min_x; }
    std::int64_t height() const { return empty ? 0 : max_y - min_y; }
    bool contains(Point p) const {
        return !empty && p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
    }
    friend bool operator==(const Bounds&, const Bounds&) = default;
};

Bounds bounds_of(const Shape& shape);

/// Annotation text metrics shared by the DXF, SVG and raster writers.
namespace text_metrics {
inline constexpr std::int64_t kHeight = 100;
inline constexpr std::int64_t kGlyphWidth = kHeight / 2;
inline constexpr std::int64_t kAdvance = kHeight;
/// Width of a run of `chars` glyphs.
constexpr std::int64_t width(std::size_t chars) {
    return chars == 0 ? 0 : static_cast<std::int64_t>(chars) * kAdvance - (kAdvance - kGlyphWidth);
}
}  // namespace text_metrics

/// A numeric dimension label tied to exactly one primitive.
struct DimensionAnnotation {
    std::string id;
    std::int64_t value = 0;
    std::string parameter_name;
    std::string target_primitive_id;
    LineSegment witness_a;
    LineSegment witness_b;
    LineSegment dimension_line;
    Point text_anchor;      // centre of the text box
    int rotation_deg = 0;   // 0 (horizontal) or 90 (reads bottom-up)
    ViewId view = ViewId::Front;

    std::string text() const { return std::to_string(value); }
    Bounds text_bounds() const;
    friend bool operator==(const DimensionAnnotation&, const DimensionAnnotation&) = default;
};

struct View {
    ViewId id = ViewId::Front;
    std::vector<Primitive> primitives;
    std::vector<DimensionAnnotation> annotations;

    const Primitive* find(std::string_view primitive_id) const;
    /// Encloses primitives, leader geometry and annotation text.
    Bounds bounds() const;
    /// Bounds of primitives only.
    Bounds geometry_bounds() const;
};

struct Drawing {
    View front{ViewId::Front, {}, {}};
    View top{ViewId::Top, {}, {}};
    View side{ViewId::Side, {}, {}};

    const View& view(ViewId id) const;
    View& view(ViewId id);
};

/// Builds front (elevation), top (plan) and side (profile) views of a pier.
///
/// Front: pile cap, columns, cap beam (notched where bearings seat) and
/// bearings. Top: cap-beam plan and, in a band below it, the pile row.
/// Side: single-column profile. Every recognition parameter is dimensioned
/// in at least one view; counts are carried only by primitive multiplicity
/// and composites are never dimensioned.
Drawing build_views(const ParameterVector& v);

/// Annotated values by parameter name, first view (front, top, side) wins.
/// Throws ConflictingAnnotation when duplicates disagree.
std::map<std::string, std::int64_t> extract_annotations(const Drawing& d);
std::map<std::string, std::int64_t> extract_annotations(const std::vector<const View*>& views);

/// Closed contours (circles or closed polylines) on `layer` in `view`.
std::size_t count_layer(const Drawing& d, Layer layer, ViewId view);

}  // namespace piergen
