#include "piergen/raster.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "piergen/errors.hpp"

namespace piergen {

void RasterConfig::validate() const {
    if (width_px <= 0 || height_px <= 0) throw Error("raster size must be positive");
    if (stroke_width_px <= 0) throw Error("stroke width must be positive");
    if (!(margin_fraction >= 0.0 && margin_fraction < 0.5)) throw Error("margin fraction must be in [0, 0.5)");
}

ViewTransform ViewTransform::fit(const Bounds& b, const RasterConfig& cfg) {
    cfg.validate();
    if (b.empty || (b.width() == 0 && b.height() == 0)) throw DegenerateBounds();
    const double avail_w = cfg.width_px * (1.0 - 2.0 * cfg.margin_fraction);
    const double avail_h = cfg.height_px * (1.0 - 2.0 * cfg.margin_fraction);
    double scale = std::numeric_limits<double>::infinity();
    if (b.width() > 0) scale = std::min(scale, avail_w / static_cast<double>(b.width()));
    if (b.height() > 0) scale = std::min(scale, avail_h / static_cast<double>(b.height()));
    ViewTransform t;
    t.scale = scale;
    t.center_x = (static_cast<double>(b.min_x) + static_cast<double>(b.max_x)) / 2.0;
    t.center_y = (static_cast<double>(b.min_y) + static_cast<double>(b.max_y)) / 2.0;
    t.width = cfg.width_px;
    t.height = cfg.height_px;
    return t;
}

namespace {

class Canvas {
public:
    Canvas(int w, int h, int stroke) : w_(w), h_(h), stroke_(stroke), pixels_(static_cast<std::size_t>(w) * h, 255) {}

    void stamp(double x, double y) {
        const int cx = static_cast<int>(std::floor(x));
        const int cy = static_cast<int>(std::floor(y));
        const int lo = -(stroke_ / 2);
        for (int dy = lo; dy < lo + stroke_; ++dy) {
            for (int dx = lo; dx < lo + stroke_; ++dx) set(cx + dx, cy + dy);
        }
    }

    void line(double x0, double y0, double x1, double y1) {
        const double len = std::max(std::fabs(x1 - x0), std::fabs(y1 - y0));
        const int steps = static_cast<int>(std::ceil(len * 2.0)) + 1;
        for (int i = 0; i <= steps; ++i) {
            const double t = static_cast<double>(i) / steps;
            stamp(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t);
        }
    }

    void circle(double cx, double cy, double r) {
        const int steps = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * r * 2.0)));
        for (int i = 0; i < steps; ++i) {
            const double a = 2.0 * std::numbers::pi * i / steps;
            stamp(cx + r * std::cos(a), cy + r * std::sin(a));
        }
    }

    std::vector<std::uint8_t> take() { return std::move(pixels_); }

private:
    void set(int x, int y) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        pixels_[static_cast<std::size_t>(y) * w_ + x] = 0;
    }

    int w_, h_, stroke_;
    std::vector<std::uint8_t> pixels_;
};

// Seven-segment strokes in a unit glyph box (u right, v up).
struct Segment {
    double u0, v0, u1, v1;
};
constexpr std::array<Segment, 7> kSegments{{
    {0, 1, 1, 1},      // a
    {1, 1, 1, 0.5},    // b
    {1, 0.5, 1, 0},    // c
    {0, 0, 1, 0},      // d
    {0, 0, 0, 0.5},    // e
    {0, 0.5, 0, 1},    // f
    {0, 0.5, 1, 0.5},  // g
}};

// Bit i set => segment i lit.
std::uint8_t glyph_mask(char c) {
    switch (c) {
        case '0': return 0b0111111;
        case '1': return 0b0000110;
        case '2': return 0b1011011;
        case '3': return 0b1001111;
        case '4': return 0b1100110;
        case '5': return 0b1101101;
        case '6': return 0b1111101;
        case '7': return 0b0000111;
        case '8': return 0b1111111;
        case '9': return 0b1101111;
        case '-': return 0b1000000;
        default: return 0;
    }
}

void draw_text(Canvas& canvas, const ViewTransform& t, const DimensionAnnotation& a) {
    const std::string text = a.text();
    const double h = text_metrics::kHeight;
    const double gw = text_metrics::kGlyphWidth;
    const double w = static_cast<double>(text_metrics::width(text.size()));
    const bool rotated = a.rotation_deg == 90;
    auto to_world = [&](double lx, double ly) {
        // Rotation by +90 degrees maps (x, y) -> (-y, x).
        double wx = rotated ? -ly : lx;
        double wy = rotated ? lx : ly;
        return std::pair{a.text_anchor.x + wx, a.text_anchor.y + wy};
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const double left = -w / 2.0 + static_cast<double>(i) * text_metrics::kAdvance;
        const double bottom = -h / 2.0;
        const std::uint8_t mask = glyph_mask(text[i]);
        for (std::size_t s = 0; s < kSegments.size(); ++s) {
            if (!(mask & (1u << s))) continue;
            const Segment& seg = kSegments[s];
            auto [x0, y0] = to_world(left + seg.u0 * gw, bottom + seg.v0 * h);
            auto [x1, y1] = to_world(left + seg.u1 * gw, bottom + seg.v1 * h);
            canvas.line(t.px(x0), t.py(y0), t.px(x1), t.py(y1));
        }
    }
}

void draw_segment(Canvas& canvas, const ViewTransform& t, const LineSegment& s) {
    canvas.line(t.px(static_cast<double>(s.a.x)), t.py(static_cast<double>(s.a.y)), t.px(static_cast<double>(s.b.x)),
                t.py(static_cast<double>(s.b.y)));
}

void draw_shape(Canvas& canvas, const ViewTransform& t, const Shape& shape) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                draw_segment(canvas, t, s);
            } else if constexpr (std::is_same_v<T, Circle>) {
                canvas.circle(t.px(static_cast<double>(s.center.x)), t.py(static_cast<double>(s.center.y)),
                              static_cast<double>(s.radius) * t.scale);
            } else {
                const std::size_t n = s.points.size();
                for (std::size_t i = 0; i + 1 < n; ++i) draw_segment(canvas, t, {s.points[i], s.points[i + 1]});
                if (s.closed && n >= 2) draw_segment(canvas, t, {s.points[n - 1], s.points[0]});
            }
        },
        shape);
}

void put_u32(std::string& out, std::uint32_t v) {
    out += static_cast<char>((v >> 24) & 0xff);
    out += static_cast<char>((v >> 16) & 0xff);
    out += static_cast<char>((v >> 8) & 0xff);
    out += static_cast<char>(v & 0xff);
}

void put_chunk(std::string& out, const char type[4], const std::string& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    uLong crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

View translated(const View& v, std::int64_t dx, std::int64_t dy) {
    auto move = [dx, dy](Point& p) {
        p.x += dx;
        p.y += dy;
    };
    View out = v;
    for (auto& p : out.primitives) {
        std::visit(
            [&](auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, LineSegment>) {
                    move(s.a);
                    move(s.b);
                } else if constexpr (std::is_same_v<T, Circle>) {
                    move(s.center);
                } else {
                    for (auto& pt : s.points) move(pt);
                }
            },
            p.shape);
    }
    for (auto& a : out.annotations) {
        for (LineSegment* s : {&a.witness_a, &a.witness_b, &a.dimension_line}) {
            move(s->a);
            move(s->b);
        }
        move(a.text_anchor);
    }
    return out;
}

}  // namespace

Raster rasterize(const View& view, const RasterConfig& cfg) {
    const ViewTransform t = ViewTransform::fit(view.bounds(), cfg);
    Canvas canvas(cfg.width_px, cfg.height_px, cfg.stroke_width_px);
    for (const auto& p : view.primitives) draw_shape(canvas, t, p.shape);
    for (const auto& a : view.annotations) {
        draw_segment(canvas, t, a.witness_a);
        draw_segment(canvas, t, a.witness_b);
        draw_segment(canvas, t, a.dimension_line);
        draw_text(canvas, t, a);
    }
    Raster r;
    r.width = cfg.width_px;
    r.height = cfg.height_px;
    r.pixels = canvas.take();
    r.png = encode_png_gray(r.width, r.height, r.pixels);
    return r;
}

Raster rasterize(const Drawing& d, ViewId view, const RasterConfig& cfg) { return rasterize(d.view(view), cfg); }

View compose_sheet(const Drawing& d) {
    constexpr std::int64_t kGap = 2000;
    const Bounds fb = d.front.bounds();
    const Bounds sb = d.side.bounds();
    const Bounds tb = d.top.bounds();
    View sheet;
    sheet.id = ViewId::Front;
    auto append = [&sheet](const View& v) {
        sheet.primitives.insert(sheet.primitives.end(), v.primitives.begin(), v.primitives.end());
        sheet.annotations.insert(sheet.annotations.end(), v.annotations.begin(), v.annotations.end());
    };
    append(d.front);
    // Side view shares the elevation levels; top view shares the cross-bridge axis.
    append(translated(d.side, fb.max_x + kGap - sb.min_x, 0));
    append(translated(d.top, 0, fb.min_y - kGap - tb.max_y));
    return sheet;
}

Raster rasterize_sheet(const Drawing& d, const RasterConfig& cfg) { return rasterize(compose_sheet(d), cfg); }

std::string encode_png_gray(int width, int height, const std::vector<std::uint8_t>& pixels) {
    if (width <= 0 || height <= 0 || pixels.size() != static_cast<std::size_t>(width) * height) {
        throw Error("pixel buffer does not match image size");
    }
    std::string raw;
    raw.reserve(static_cast<std::size_t>(width + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw += '\0';  // filter: none
        raw.append(reinterpret_cast<const char*>(pixels.data()) + static_cast<std::size_t>(y) * width,
                   static_cast<std::size_t>(width));
    }
    uLongf cap = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(cap, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &cap, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw Error("zlib compression failed");
    }
    compressed.resize(cap);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr += static_cast<char>(8);  // bit depth
    ihdr += static_cast<char>(0);  // grayscale
    ihdr += static_cast<char>(0);  // deflate
    ihdr += static_cast<char>(0);  // adaptive filtering
    ihdr += static_cast<char>(0);  // no interlace
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", compressed);
    put_chunk(out, "IEND", "");
    return out;
}

}  // namespace piergen
