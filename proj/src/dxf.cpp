#include "piergen/dxf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "piergen/errors.hpp"

namespace piergen {

namespace {

constexpr std::string_view kAppId = "PIERGEN";
constexpr std::string_view kViewComment = "piergen view ";

int layer_color(Layer l) {
    switch (l) {
        case Layer::CapBeam: return 1;
        case Layer::PierColumn: return 2;
        case Layer::PileCap: return 3;
        case Layer::Piles: return 4;
        case Layer::Bearings: return 5;
        case Layer::Dimensions: return 7;
    }
    return 7;
}

class DxfWriter {
public:
    void group(int code, std::string_view value) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%3d", code);
        out_ += buf;
        out_ += '\n';
        out_ += value;
        out_ += '\n';
    }
    void group(int code, std::int64_t value) { group(code, std::string_view(std::to_string(value))); }

    void handle() {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%X", next_handle_++);
        group(5, std::string_view(buf));
    }

    void entity(std::string_view type, std::string_view subclass, Layer layer) {
        group(0, type);
        handle();
        group(100, "AcDbEntity");
        group(8, to_string(layer));
        group(100, subclass);
    }

    void table(std::string_view name, std::int64_t entries) {
        group(0, "TABLE");
        group(2, name);
        handle();
        group(100, "AcDbSymbolTable");
        group(70, entries);
    }

    void record(std::string_view type, std::string_view subclass, std::string_view name) {
        group(0, type);
        handle();
        group(100, "AcDbSymbolTableRecord");
        group(100, subclass);
        group(2, name);
        group(70, std::int64_t{0});
    }

    void point(int base, Point p) {
        group(base, p.x);
        group(base + 10, p.y);
        group(base + 20, std::int64_t{0});
    }

    void xdata(std::initializer_list<std::string_view> strings, std::optional<int> role = std::nullopt) {
        group(1001, kAppId);
        for (auto s : strings) group(1000, s);
        if (role) group(1070, std::int64_t{*role});
    }

    std::string take() { return std::move(out_); }

private:
    std::string out_;
    unsigned next_handle_ = 0x100;
};

void write_shape(DxfWriter& w, const Primitive& p) {
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LineSegment>) {
                w.entity("LINE", "AcDbLine", p.layer);
                w.point(10, s.a);
                w.point(11, s.b);
            } else if constexpr (std::is_same_v<T, Circle>) {
                w.entity("CIRCLE", "AcDbCircle", p.layer);
                w.point(10, s.center);
                w.group(40, s.radius);
            } else {
                w.entity("LWPOLYLINE", "AcDbPolyline", p.layer);
                w.group(90, static_cast<std::int64_t>(s.points.size()));
                w.group(70, std::int64_t{s.closed ? 1 : 0});
                for (const auto& pt : s.points) {
                    w.group(10, pt.x);
                    w.group(20, pt.y);
                }
            }
        },
        p.shape);
    w.xdata({"primitive", p.id});
}

void write_leader(DxfWriter& w, const DimensionAnnotation& a, const LineSegment& s, int role) {
    w.entity("LINE", "AcDbLine", Layer::Dimensions);
    w.point(10, s.a);
    w.point(11, s.b);
    w.xdata({"leader", a.id}, role);
}

}  // namespace

std::string write_dxf(const View& view) {
    DxfWriter w;
    w.group(999, std::string(kViewComment) + std::string(to_string(view.id)));

    w.group(0, "SECTION");
    w.group(2, "HEADER");
    w.group(9, "$ACADVER");
    w.group(1, "AC1015");
    w.group(9, "$INSUNITS");
    w.group(70, std::int64_t{4});
    w.group(0, "ENDSEC");

    w.group(0, "SECTION");
    w.group(2, "TABLES");
    w.table("APPID", 1);
    w.record("APPID", "AcDbRegAppTableRecord", kAppId);
    w.group(0, "ENDTAB");
    w.table("LAYER", static_cast<std::int64_t>(std::size(kAllLayers)));
    for (Layer l : kAllLayers) {
        w.record("LAYER", "AcDbLayerTableRecord", to_string(l));
        w.group(62, std::int64_t{layer_color(l)});
        w.group(6, "CONTINUOUS");
    }
    w.group(0, "ENDTAB");
    w.group(0, "ENDSEC");

    w.group(0, "SECTION");
    w.group(2, "ENTITIES");
    for (const auto& p : view.primitives) write_shape(w, p);
    for (const auto& a : view.annotations) {
        write_leader(w, a, a.witness_a, 0);
        write_leader(w, a, a.witness_b, 1);
        write_leader(w, a, a.dimension_line, 2);
        w.entity("TEXT", "AcDbText", Layer::Dimensions);
        w.point(10, a.text_anchor);
        w.group(40, text_metrics::kHeight);
        w.group(1, a.text());
        w.group(50, std::int64_t{a.rotation_deg});
        w.group(72, std::int64_t{1});
        w.point(11, a.text_anchor);
        w.group(100, "AcDbText");
        w.group(73, std::int64_t{2});
        w.xdata({"annotation", a.id, a.parameter_name, a.target_primitive_id});
    }
    w.group(0, "ENDSEC");
    w.group(0, "EOF");
    return w.take();
}

std::string write_dxf(const Drawing& d, ViewId view) { return write_dxf(d.view(view)); }

namespace {

struct Group {
    int code = 0;
    std::string value;
    std::size_t line = 0;  // 1-based line of the group code
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<Group> tokenize(std::string_view bytes) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < bytes.size()) {
        std::size_t nl = bytes.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(bytes.substr(start));
            break;
        }
        lines.push_back(bytes.substr(start, nl - start));
        start = nl + 1;
    }
    if (lines.size() % 2 != 0) throw MalformedDxf(lines.size(), "group code without value");
    std::vector<Group> groups;
    groups.reserve(lines.size() / 2);
    for (std::size_t i = 0; i < lines.size(); i += 2) {
        std::string_view code_text = trim(lines[i]);
        int code = 0;
        auto [ptr, ec] = std::from_chars(code_text.data(), code_text.data() + code_text.size(), code);
        if (ec != std::errc() || ptr != code_text.data() + code_text.size()) {
            throw MalformedDxf(i + 1, "invalid group code '" + std::string(code_text) + "'");
        }
        groups.push_back({code, std::string(trim(lines[i + 1])), i + 1});
    }
    return groups;
}

std::int64_t parse_integral(const Group& g) {
    char* end = nullptr;
    double v = std::strtod(g.value.c_str(), &end);
    if (end == g.value.c_str() || *end != '\0' || !std::isfinite(v)) {
        throw MalformedDxf(g.line + 1, "expected a number, got '" + g.value + "'");
    }
    double r = std::round(v);
    if (std::fabs(v - r) > 1e-6) throw MalformedDxf(g.line + 1, "non-integral coordinate " + g.value);
    return static_cast<std::int64_t>(r);
}

/// Groups of one entity, with extended data split off.
struct EntityRecord {
    std::string type;
    std::size_t line = 0;
    std::vector<Group> groups;
    std::vector<std::string> xstrings;  // 1000 values after `1001 PIERGEN`
    std::optional<std::int64_t> xrole;  // 1070

    const Group* find(int code) const {
        for (const auto& g : groups) {
            if (g.code == code) return &g;
        }
        return nullptr;
    }
    const Group& require(int code) const {
        const Group* g = find(code);
        if (!g) throw MalformedDxf(line, type + " without group code " + std::to_string(code));
        return *g;
    }
    Point point(int base) const { return {parse_integral(require(base)), parse_integral(require(base + 10))}; }
};

class Reader {
public:
    explicit Reader(std::vector<Group> groups) : g_(std::move(groups)) {}

    View read() {
        View view;
        bool have_view = false;
        bool saw_eof = false;
        while (pos_ < g_.size()) {
            const Group& g = g_[pos_];
            if (g.code == 999) {
                if (g.value.rfind(kViewComment, 0) == 0) {
                    try {
                        view.id = parse_view_id(std::string_view(g.value).substr(kViewComment.size()));
                    } catch (const Error&) {
                        throw MalformedDxf(g.line + 1, "unknown view name");
                    }
                    have_view = true;
                }
                ++pos_;
                continue;
            }
            if (g.code != 0) throw MalformedDxf(g.line, "expected group code 0");
            if (g.value == "EOF") {
                saw_eof = true;
                ++pos_;
                break;
            }
            if (g.value != "SECTION") throw MalformedDxf(g.line, "expected SECTION, got " + g.value);
            ++pos_;
            if (pos_ >= g_.size() || g_[pos_].code != 2) throw MalformedDxf(g.line, "SECTION without name");
            std::string name = g_[pos_].value;
            ++pos_;
            if (name == "ENTITIES") {
                read_entities(view);
            } else if (name == "TABLES") {
                read_tables();
            } else {
                skip_section();
            }
        }
        if (!saw_eof) throw MalformedDxf(last_line(), "missing EOF");
        if (pos_ != g_.size()) throw MalformedDxf(g_[pos_].line, "data after EOF");
        if (!have_view) throw MalformedDxf(1, "missing view comment");
        return view;
    }

private:
    std::size_t last_line() const { return g_.empty() ? 0 : g_.back().line + 1; }

    void skip_section() {
        while (pos_ < g_.size()) {
            if (g_[pos_].code == 0 && g_[pos_].value == "ENDSEC") {
                ++pos_;
                return;
            }
            if (g_[pos_].code == 0 && (g_[pos_].value == "SECTION" || g_[pos_].value == "EOF")) break;
            ++pos_;
        }
        throw MalformedDxf(last_line(), "unterminated section");
    }

    void read_tables() {
        bool in_layer_table = false;
        while (pos_ < g_.size()) {
            const Group& g = g_[pos_];
            if (g.code == 0 && g.value == "ENDSEC") {
                ++pos_;
                return;
            }
            if (g.code == 0 && (g.value == "SECTION" || g.value == "EOF")) break;
            if (g.code == 0 && g.value == "TABLE") {
                in_layer_table = pos_ + 1 < g_.size() && g_[pos_ + 1].code == 2 && g_[pos_ + 1].value == "LAYER";
            } else if (g.code == 0 && g.value == "ENDTAB") {
                in_layer_table = false;
            } else if (in_layer_table && g.code == 0 && g.value == "LAYER") {
                for (std::size_t k = pos_ + 1; k < g_.size() && g_[k].code != 0; ++k) {
                    if (g_[k].code == 2) {
                        declared_layers_.push_back(g_[k].value);
                        break;
                    }
                }
            }
            ++pos_;
        }
        throw MalformedDxf(last_line(), "unterminated TABLES section");
    }

    void read_entities(View& view) {
        std::vector<EntityRecord> records;
        while (pos_ < g_.size()) {
            const Group& g = g_[pos_];
            if (g.code != 0) throw MalformedDxf(g.line, "expected entity start");
            if (g.value == "ENDSEC") {
                ++pos_;
                assemble(records, view);
                return;
            }
            if (g.value == "SECTION" || g.value == "EOF") break;
            EntityRecord rec;
            rec.type = g.value;
            rec.line = g.line;
            ++pos_;
            bool in_xdata = false;
            bool ours = false;
            while (pos_ < g_.size() && g_[pos_].code != 0) {
                const Group& e = g_[pos_];
                if (e.code == 1001) {
                    in_xdata = true;
                    ours = e.value == kAppId;
                } else if (in_xdata) {
                    if (ours && e.code == 1000) rec.xstrings.push_back(e.value);
                    if (ours && e.code == 1070) rec.xrole = parse_integral(e);
                } else {
                    rec.groups.push_back(e);
                }
                ++pos_;
            }
            if (rec.type != "LINE" && rec.type != "CIRCLE" && rec.type != "LWPOLYLINE" && rec.type != "TEXT") {
                throw UnsupportedEntity(rec.type);
            }
            records.push_back(std::move(rec));
        }
        throw MalformedDxf(last_line(), "unterminated ENTITIES section");
    }

    Layer layer_of(const EntityRecord& rec) const {
        const Group& g = rec.require(8);
        auto layer = parse_layer(g.value);
        if (!layer) throw MalformedDxf(g.line + 1, "unknown layer '" + g.value + "'");
        if (!declared_layers_.empty() &&
            std::find(declared_layers_.begin(), declared_layers_.end(), g.value) == declared_layers_.end()) {
            throw MalformedDxf(g.line + 1, "layer '" + g.value + "' not declared");
        }
        return *layer;
    }

    static std::string fallback_id(const EntityRecord& rec) {
        const Group* h = rec.find(5);
        return h ? "h" + h->value : "line" + std::to_string(rec.line);
    }

    void assemble(const std::vector<EntityRecord>& records, View& view) const {
        struct Pending {
            DimensionAnnotation annotation;
            int parts = 0;  // bit per leader role, bit 3 for the text
        };
        std::map<std::string, Pending> pending;
        std::vector<std::string> annotation_order;
        auto slot = [&](const std::string& id) -> Pending& {
            auto [it, inserted] = pending.try_emplace(id);
            if (inserted) {
                annotation_order.push_back(id);
                it->second.annotation.id = id;
                it->second.annotation.view = view.id;
            }
            return it->second;
        };

        for (const auto& rec : records) {
            Layer layer = layer_of(rec);
            const bool tagged = !rec.xstrings.empty();
            const std::string role = tagged ? rec.xstrings[0] : "";
            if (rec.type == "TEXT") {
                if (role != "annotation" || rec.xstrings.size() < 4) {
                    throw MalformedDxf(rec.line, "TEXT without annotation data");
                }
                Pending& p = slot(rec.xstrings[1]);
                DimensionAnnotation& a = p.annotation;
                a.parameter_name = rec.xstrings[2];
                a.target_primitive_id = rec.xstrings[3];
                a.value = parse_integral(rec.require(1));
                a.text_anchor = rec.find(11) ? rec.point(11) : rec.point(10);
                a.rotation_deg = rec.find(50) ? static_cast<int>(parse_integral(*rec.find(50))) : 0;
                p.parts |= 1 << 3;
                continue;
            }
            if (rec.type == "LINE" && role == "leader") {
                if (rec.xstrings.size() < 2 || !rec.xrole || *rec.xrole < 0 || *rec.xrole > 2) {
                    throw MalformedDxf(rec.line, "leader LINE without annotation link");
                }
                Pending& p = slot(rec.xstrings[1]);
                LineSegment s{rec.point(10), rec.point(11)};
                LineSegment* target[] = {&p.annotation.witness_a, &p.annotation.witness_b,
                                         &p.annotation.dimension_line};
                *target[*rec.xrole] = s;
                p.parts |= 1 << *rec.xrole;
                continue;
            }
            Primitive prim;
            prim.layer = layer;
            prim.id = (role == "primitive" && rec.xstrings.size() >= 2) ? rec.xstrings[1] : fallback_id(rec);
            if (rec.type == "LINE") {
                prim.shape = LineSegment{rec.point(10), rec.point(11)};
            } else if (rec.type == "CIRCLE") {
                std::int64_t r = parse_integral(rec.require(40));
                if (r <= 0) throw MalformedDxf(rec.line, "CIRCLE radius must be positive");
                prim.shape = Circle{rec.point(10), r};
            } else {
                Polyline poly;
                const Group* flags = rec.find(70);
                poly.closed = flags && (parse_integral(*flags) & 1);
                std::optional<std::int64_t> x;
                for (const auto& g : rec.groups) {
                    if (g.code == 10) {
                        if (x) throw MalformedDxf(g.line, "LWPOLYLINE vertex without y");
                        x = parse_integral(g);
                    } else if (g.code == 20) {
                        if (!x) throw MalformedDxf(g.line, "LWPOLYLINE y without x");
                        poly.points.push_back({*x, parse_integral(g)});
                        x.reset();
                    }
                }
                if (x) throw MalformedDxf(rec.line, "LWPOLYLINE vertex without y");
                if (const Group* n = rec.find(90)) {
                    if (parse_integral(*n) != static_cast<std::int64_t>(poly.points.size())) {
                        throw MalformedDxf(n->line, "LWPOLYLINE vertex count mismatch");
                    }
                }
                if (poly.closed && poly.points.size() < 3) {
                    throw MalformedDxf(rec.line, "closed LWPOLYLINE needs at least 3 vertices");
                }
                prim.shape = std::move(poly);
            }
            view.primitives.push_back(std::move(prim));
        }

        for (const auto& id : annotation_order) {
            const Pending& p = pending.at(id);
            if (p.parts != 0b1111) throw MalformedDxf(0, "incomplete annotation '" + id + "'");
            view.annotations.push_back(p.annotation);
        }
    }

    std::vector<Group> g_;
    std::size_t pos_ = 0;
    std::vector<std::string> declared_layers_;
};

}  // namespace

View parse_dxf(std::string_view bytes) { return Reader(tokenize(bytes)).read(); }

std::string write_svg(const View& view) {
    Bounds b = view.bounds();
    const std::int64_t pad = 200;
    std::ostringstream os;
    const std::int64_t w = b.width() + 2 * pad;
    const std::int64_t h = b.height() + 2 * pad;
    // Flip y: screen_y = max_y + pad - y
    auto sx = [&](std::int64_t x) { return x - b.min_x + pad; };
    auto sy = [&](std::int64_t y) { return b.max_y + pad - y; };
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << ' ' << h << "\" width=\"" << w / 10
       << "\" height=\"" << h / 10 << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& p : view.primitives) {
        os << "<g class=\"" << to_string(p.layer) << "\" id=\"" << p.id << "\">";
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, LineSegment>) {
                    os << "<line x1=\"" << sx(s.a.x) << "\" y1=\"" << sy(s.a.y) << "\" x2=\"" << sx(s.b.x)
                       << "\" y2=\"" << sy(s.b.y) << "\" stroke=\"black\" stroke-width=\"20\"/>";
                } else if constexpr (std::is_same_v<T, Circle>) {
                    os << "<circle cx=\"" << sx(s.center.x) << "\" cy=\"" << sy(s.center.y) << "\" r=\"" << s.radius
                       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"20\"/>";
                } else {
                    os << (s.closed ? "<polygon" : "<polyline") << " points=\"";
                    for (std::size_t i = 0; i < s.points.size(); ++i) {
                        if (i) os << ' ';
                        os << sx(s.points[i].x) << ',' << sy(s.points[i].y);
                    }
                    os << "\" fill=\"none\" stroke=\"black\" stroke-width=\"20\"/>";
                }
            },
            p.shape);
        os << "</g>\n";
    }
    for (const auto& a : view.annotations) {
        os << "<g class=\"DIMENSIONS\" id=\"" << a.id << "\" data-parameter=\"" << a.parameter_name
           << "\" data-target=\"" << a.target_primitive_id << "\">";
        for (const LineSegment* s : {&a.witness_a, &a.witness_b, &a.dimension_line}) {
            os << "<line x1=\"" << sx(s->a.x) << "\" y1=\"" << sy(s->a.y) << "\" x2=\"" << sx(s->b.x) << "\" y2=\""
               << sy(s->b.y) << "\" stroke=\"black\" stroke-width=\"10\"/>";
        }
        os << "<text x=\"" << sx(a.text_anchor.x) << "\" y=\"" << sy(a.text_anchor.y) << "\" font-size=\""
           << text_metrics::kHeight << "\" text-anchor=\"middle\" dominant-baseline=\"middle\"";
        if (a.rotation_deg != 0) {
            os << " transform=\"rotate(" << -a.rotation_deg << ' ' << sx(a.text_anchor.x) << ' '
               << sy(a.text_anchor.y) << ")\"";
        }
        os << '>' << a.text() << "</text></g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace piergen
