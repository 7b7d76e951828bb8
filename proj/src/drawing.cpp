#include "piergen/drawing.hpp"

#include <algorithm>

#include "piergen/errors.hpp"
#include "piergen/layout.hpp"

namespace piergen {

std::string_view to_string(Layer layer) {
    switch (layer) {
        case Layer::CapBeam: return "CAP_BEAM";
        case Layer::PierColumn: return "PIER_COLUMN";
        case Layer::PileCap: return "PILE_CAP";
        case Layer::Piles: return "PILES";
        case Layer::Bearings: return "BEARINGS";
        case Layer::Dimensions: return "DIMENSIONS";
    }
    return "?";
}

std::optional<Layer> parse_layer(std::string_view name) {
    for (Layer l : kAllLayers) {
        if (to_string(l) == name) return l;
    }
    return std::nullopt;
}

bool Primitive::is_closed_contour() const {
    if (std::holds_alternative<Circle>(shape)) return true;
    if (const auto* p = std::get_if<Polyline>(&shape)) return p->closed;
    return false;
}

void Bounds::add(Point p) {
    if (empty) {
        min_x = max_x = p.x;
        min_y = max_y = p.y;
        empty = false;
        return;
    }
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
}

void Bounds::add(const Bounds& other) {
    if (other.empty) return;
    add(Point{other.min_x, other.min_y});
    add(Point{other.max_x, other.max_y});
}

Bounds bounds_of(const Shape& shape) {
    Bounds b;
    std::visit(
        [&b](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                b.add(s.a);
                b.add(s.b);
            } else if constexpr (std::is_same_v<T, Circle>) {
                b.add(Point{s.center.x - s.radius, s.center.y - s.radius});
                b.add(Point{s.center.x + s.radius, s.center.y + s.radius});
            } else {
                for (const auto& p : s.points) b.add(p);
            }
        },
        shape);
    return b;
}

Bounds DimensionAnnotation::text_bounds() const {
    std::int64_t w = text_metrics::width(text().size());
    std::int64_t h = text_metrics::kHeight;
    if (rotation_deg == 90) std::swap(w, h);
    Bounds b;
    b.add(Point{text_anchor.x - w / 2, text_anchor.y - h / 2});
    b.add(Point{text_anchor.x - w / 2 + w, text_anchor.y - h / 2 + h});
    return b;
}

const Primitive* View::find(std::string_view primitive_id) const {
    for (const auto& p : primitives) {
        if (p.id == primitive_id) return &p;
    }
    return nullptr;
}

Bounds View::geometry_bounds() const {
    Bounds b;
    for (const auto& p : primitives) b.add(bounds_of(p.shape));
    return b;
}

Bounds View::bounds() const {
    Bounds b = geometry_bounds();
    for (const auto& a : annotations) {
        for (const LineSegment* s : {&a.witness_a, &a.witness_b, &a.dimension_line}) {
            b.add(s->a);
            b.add(s->b);
        }
        b.add(a.text_bounds());
    }
    return b;
}

const View& Drawing::view(ViewId id) const {
    switch (id) {
        case ViewId::Front: return front;
        case ViewId::Top: return top;
        case ViewId::Side: return side;
    }
    return front;
}

View& Drawing::view(ViewId id) {
    return const_cast<View&>(static_cast<const Drawing&>(*this).view(id));
}

namespace {

constexpr std::int64_t kOffset = 300;  // first tier distance from geometry
constexpr std::int64_t kTier = 250;
constexpr std::int64_t kTextGap = 125;  // dimension line to text centre
constexpr std::int64_t kPilePlanGap = 1000;

Polyline rect(std::int64_t x0, std::int64_t y0, std::int64_t x1, std::int64_t y1) {
    return Polyline{{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}, true};
}

class ViewBuilder {
public:
    explicit ViewBuilder(ViewId id) { view_.id = id; }

    const std::string& add(std::string local_id, Shape shape, Layer layer) {
        view_.primitives.push_back({prefix() + local_id, std::move(shape), layer});
        return view_.primitives.back().id;
    }

    /// Horizontal dimension between x0 and x1; features at heights y0/y1.
    /// `above` places it above the geometry, otherwise below.
    void horizontal(const std::string& param, std::int64_t value, const std::string& target, std::int64_t x0,
                    std::int64_t fy0, std::int64_t x1, std::int64_t fy1, bool above, int tier) {
        Bounds g = view_.geometry_bounds();
        std::int64_t y = above ? g.max_y + kOffset + tier * kTier : g.min_y - kOffset - tier * kTier;
        DimensionAnnotation a;
        a.witness_a = {{x0, fy0}, {x0, y}};
        a.witness_b = {{x1, fy1}, {x1, y}};
        a.dimension_line = {{x0, y}, {x1, y}};
        a.text_anchor = {x0 + (x1 - x0) / 2, y + kTextGap};
        a.rotation_deg = 0;
        push(std::move(a), param, value, target);
    }

    /// Vertical dimension to the right of the geometry.
    void vertical(const std::string& param, std::int64_t value, const std::string& target, std::int64_t fx0,
                  std::int64_t y0, std::int64_t fx1, std::int64_t y1, int tier) {
        Bounds g = view_.geometry_bounds();
        std::int64_t x = g.max_x + kOffset + tier * kTier;
        DimensionAnnotation a;
        a.witness_a = {{fx0, y0}, {x, y0}};
        a.witness_b = {{fx1, y1}, {x, y1}};
        a.dimension_line = {{x, y0}, {x, y1}};
        a.text_anchor = {x - kTextGap, y0 + (y1 - y0) / 2};
        a.rotation_deg = 90;
        push(std::move(a), param, value, target);
    }

    View take() { return std::move(view_); }

private:
    std::string prefix() const { return std::string(to_string(view_.id)) + "."; }

    void push(DimensionAnnotation a, const std::string& param, std::int64_t value, const std::string& target) {
        a.id = prefix() + "dim." + param;
        a.parameter_name = param;
        a.value = value;
        a.target_primitive_id = target;
        a.view = view_.id;
        view_.annotations.push_back(std::move(a));
    }

    View view_;
};

Polyline notched_cap_beam(std::int64_t x0, std::int64_t x1, std::int64_t base, std::int64_t top,
                          const std::vector<std::int64_t>& notch_centers) {
    const std::int64_t hw = dims::kBearingWidth / 2;
    Polyline p;
    p.closed = true;
    p.points.push_back({x0, base});
    p.points.push_back({x1, base});
    p.points.push_back({x1, top});
    std::vector<std::int64_t> centers = notch_centers;
    std::sort(centers.rbegin(), centers.rend());
    for (std::int64_t c : centers) {
        p.points.push_back({c + hw, top});
        p.points.push_back({c + hw, top - dims::kBearingHeight});
        p.points.push_back({c - hw, top - dims::kBearingHeight});
        p.points.push_back({c - hw, top});
    }
    p.points.push_back({x0, top});
    return p;
}

View front_view(const ParameterVector& v, const PierLayout& l) {
    ViewBuilder b(ViewId::Front);
    const std::int64_t H = l.total_height();
    const std::string pile_cap = b.add("pile_cap", rect(l.pile_cap_x0, 0, l.pile_cap_x0 + l.pile_cap_width,
                                                        l.pile_cap_height),
                                       Layer::PileCap);
    std::vector<std::string> columns;
    for (std::int64_t i = 0; i < l.num_columns; ++i) {
        std::int64_t x = l.column_left(i);
        columns.push_back(b.add("column." + std::to_string(i),
                                rect(x, l.column_base(), x + l.column_width, l.cap_beam_base()),
                                Layer::PierColumn));
    }
    std::vector<std::int64_t> bearing_x;
    for (std::int64_t j = 0; j < l.num_bearings; ++j) bearing_x.push_back(l.bearing_center_x(j));
    const std::string cap_beam =
        b.add("cap_beam", notched_cap_beam(0, l.cap_beam_width, l.cap_beam_base(), H, bearing_x), Layer::CapBeam);
    const std::int64_t hw = dims::kBearingWidth / 2;
    for (std::int64_t j = 0; j < l.num_bearings; ++j) {
        std::int64_t c = bearing_x[static_cast<std::size_t>(j)];
        b.add("bearing." + std::to_string(j), rect(c - hw, H - dims::kBearingHeight, c + hw, H), Layer::Bearings);
    }

    b.horizontal("cap_beam_cross_dim", v.at("cap_beam_cross_dim"), cap_beam, 0, H, l.cap_beam_width, H, true, 0);
    const std::int64_t c0 = l.column_left(0);
    const std::int64_t c1 = l.column_left(1);
    b.horizontal("pier_column_cross_dim", v.at("pier_column_cross_dim"), columns[0], c0, l.column_base(),
                 c0 + l.column_width, l.column_base(), false, 0);
    // Clear gap between neighbouring columns.
    b.horizontal("pile_spacing", v.at("pile_spacing"), columns[1], c0 + l.column_width, l.column_base(), c1,
                 l.column_base(), false, 1);
    const std::int64_t last_right = l.column_left(l.num_columns - 1) + l.column_width;
    b.vertical("pile_cap_height", v.at("pile_cap_height"), pile_cap, l.pile_cap_x0 + l.pile_cap_width, 0,
               l.pile_cap_x0 + l.pile_cap_width, l.pile_cap_height, 0);
    b.vertical("pier_column_height", v.at("pier_column_height"), columns.back(), last_right, l.column_base(),
               last_right, l.cap_beam_base(), 0);
    b.vertical("cap_beam_height", v.at("cap_beam_height"), cap_beam, l.cap_beam_width, l.cap_beam_base(),
               l.cap_beam_width, H, 0);
    return b.take();
}

View top_view(const ParameterVector& v, const PierLayout& l) {
    ViewBuilder b(ViewId::Top);
    const std::int64_t half = dims::kCapBeamDepth / 2;
    const std::string cap_beam = b.add("cap_beam", rect(0, -half, l.cap_beam_width, half), Layer::CapBeam);
    const std::int64_t pile_y = -half - kPilePlanGap - dims::kPileRadius;
    std::vector<std::string> piles;
    for (std::int64_t k = 0; k < l.num_piles; ++k) {
        piles.push_back(b.add("pile." + std::to_string(k), Circle{{l.pile_center_x(k), pile_y}, dims::kPileRadius},
                              Layer::Piles));
    }
    b.horizontal("cap_beam_cross_dim", v.at("cap_beam_cross_dim"), cap_beam, 0, half, l.cap_beam_width, half, true,
                 0);
    // Centre-to-centre pitch of the pile row.
    b.horizontal("pile_spacing", v.at("pile_spacing"), piles[1], l.pile_center_x(0), pile_y, l.pile_center_x(1),
                 pile_y, false, 0);
    return b.take();
}

View side_view(const ParameterVector& v, const PierLayout& l) {
    ViewBuilder b(ViewId::Side);
    const std::int64_t H = l.total_height();
    const std::int64_t cap_half = dims::kPileCapDepth / 2;
    const std::int64_t beam_half = dims::kCapBeamDepth / 2;
    const std::int64_t y0 = l.column_y0();
    const std::string pile_cap = b.add("pile_cap", rect(-cap_half, 0, cap_half, l.pile_cap_height), Layer::PileCap);
    const std::string column =
        b.add("column.0", rect(y0, l.column_base(), y0 + l.column_width, l.cap_beam_base()), Layer::PierColumn);
    const std::string cap_beam =
        b.add("cap_beam", notched_cap_beam(-beam_half, beam_half, l.cap_beam_base(), H, {0}), Layer::CapBeam);
    const std::int64_t hw = dims::kBearingWidth / 2;
    b.add("bearing.0", rect(-hw, H - dims::kBearingHeight, hw, H), Layer::Bearings);

    b.vertical("pile_cap_height", v.at("pile_cap_height"), pile_cap, cap_half, 0, cap_half, l.pile_cap_height, 0);
    b.vertical("pier_column_height", v.at("pier_column_height"), column, y0 + l.column_width, l.column_base(),
               y0 + l.column_width, l.cap_beam_base(), 0);
    b.vertical("cap_beam_height", v.at("cap_beam_height"), cap_beam, beam_half, l.cap_beam_base(), beam_half, H, 0);
    b.horizontal("pier_column_cross_dim", v.at("pier_column_cross_dim"), column, y0, l.column_base(),
                 y0 + l.column_width, l.column_base(), false, 0);
    return b.take();
}

}  // namespace

Drawing build_views(const ParameterVector& v) {
    const PierLayout l = layout_from_vector(v);
    Drawing d;
    d.front = front_view(v, l);
    d.top = top_view(v, l);
    d.side = side_view(v, l);
    return d;
}

std::map<std::string, std::int64_t> extract_annotations(const std::vector<const View*>& views) {
    std::map<std::string, std::int64_t> out;
    for (const View* view : views) {
        for (const auto& a : view->annotations) {
            auto [it, inserted] = out.emplace(a.parameter_name, a.value);
            if (!inserted && it->second != a.value) {
                throw ConflictingAnnotation(a.parameter_name, it->second, a.value);
            }
        }
    }
    return out;
}

std::map<std::string, std::int64_t> extract_annotations(const Drawing& d) {
    return extract_annotations({&d.front, &d.top, &d.side});
}

std::size_t count_layer(const Drawing& d, Layer layer, ViewId view) {
    const View& v = d.view(view);
    return static_cast<std::size_t>(std::count_if(v.primitives.begin(), v.primitives.end(), [layer](const auto& p) {
        return p.layer == layer && p.is_closed_contour();
    }));
}

}  // namespace piergen
