#include "piergen/solids.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "piergen/errors.hpp"
#include "piergen/layout.hpp"

namespace piergen {

Vec3 unit(Axis axis) {
    switch (axis) {
        case Axis::X: return {1, 0, 0};
        case Axis::Y: return {0, 1, 0};
        case Axis::Z: return {0, 0, 1};
    }
    return {0, 0, 1};
}

namespace {

char axis_char(Axis a) { return a == Axis::X ? 'x' : a == Axis::Y ? 'y' : 'z'; }

std::string format_vec(Vec3 v) {
    return std::to_string(v.x) + ' ' + std::to_string(v.y) + ' ' + std::to_string(v.z);
}

}  // namespace

std::string format_script(const ModelingScript& script) {
    std::string out = "# piergen modeling script v1\n";
    for (const auto& cmd : script.commands) {
        std::visit(
            [&out](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, MakeBox>) {
                    out += "box " + c.name + ' ' + format_vec(c.origin) + ' ' + format_vec(c.extents);
                } else if constexpr (std::is_same_v<T, MakeCylinder>) {
                    out += "cylinder " + c.name + ' ' + format_vec(c.base_center) + ' ' + std::to_string(c.radius) +
                           ' ' + std::to_string(c.height) + ' ' + axis_char(c.axis);
                } else {
                    out += "place " + c.name + ' ' + format_vec(c.translation);
                }
            },
            cmd);
        out += '\n';
    }
    return out;
}

ModelingScript parse_script(std::string_view text) {
    ModelingScript script;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? text.size() - start : nl - start);
        start = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        std::istringstream is{std::string(line)};
        std::vector<std::string> tok;
        for (std::string t; is >> t;) tok.push_back(t);
        if (tok.empty()) continue;

        auto num = [&](std::size_t i) {
            std::int64_t v = 0;
            const std::string& s = tok[i];
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size()) {
                throw ScriptSyntaxError(line_no, "expected integer, got '" + s + "'");
            }
            return v;
        };
        auto vec = [&](std::size_t i) { return Vec3{num(i), num(i + 1), num(i + 2)}; };
        auto arity = [&](std::size_t n) {
            if (tok.size() != n) {
                throw ScriptSyntaxError(line_no, "'" + tok[0] + "' takes " + std::to_string(n - 1) + " arguments");
            }
        };

        if (tok[0] == "box") {
            arity(8);
            script.commands.emplace_back(MakeBox{tok[1], vec(2), vec(5)});
        } else if (tok[0] == "cylinder") {
            arity(8);
            Axis axis;
            if (tok[7] == "x") {
                axis = Axis::X;
            } else if (tok[7] == "y") {
                axis = Axis::Y;
            } else if (tok[7] == "z") {
                axis = Axis::Z;
            } else {
                throw ScriptSyntaxError(line_no, "axis must be x, y or z");
            }
            script.commands.emplace_back(MakeCylinder{tok[1], vec(2), num(5), num(6), axis});
        } else if (tok[0] == "place") {
            arity(5);
            script.commands.emplace_back(Place{tok[1], vec(2)});
        } else {
            throw ScriptSyntaxError(line_no, "unknown command '" + tok[0] + "'");
        }
    }
    return script;
}

ModelingScript script_from_vector(const ParameterVector& v) {
    const PierLayout l = layout_from_vector(v);
    ModelingScript s;
    auto& c = s.commands;
    const std::int64_t cap_half = dims::kPileCapDepth / 2;
    const std::int64_t beam_half = dims::kCapBeamDepth / 2;

    c.emplace_back(MakeBox{"pile_cap", {l.pile_cap_x0, -cap_half, 0}, {l.pile_cap_width, dims::kPileCapDepth,
                                                                        l.pile_cap_height}});
    for (std::int64_t i = 0; i < l.num_columns; ++i) {
        std::string name = "column_" + std::to_string(i);
        c.emplace_back(MakeBox{name, {0, l.column_y0(), 0}, {l.column_width, l.column_width, l.column_height}});
        c.emplace_back(Place{name, {l.column_left(i), 0, l.column_base()}});
    }
    c.emplace_back(MakeBox{"cap_beam", {0, -beam_half, l.cap_beam_base()},
                           {l.cap_beam_width, dims::kCapBeamDepth, l.cap_beam_height}});
    // Pile heads embedded over the full pile cap depth.
    for (std::int64_t k = 0; k < l.num_piles; ++k) {
        std::string name = "pile_" + std::to_string(k);
        c.emplace_back(MakeCylinder{name, {0, 0, 0}, dims::kPileRadius, l.pile_cap_height, Axis::Z});
        c.emplace_back(Place{name, {l.pile_center_x(k), 0, 0}});
    }
    // Bearings seat in pockets flush with the cap beam top.
    const std::int64_t bw = dims::kBearingWidth / 2;
    const std::int64_t bd = dims::kBearingDepth / 2;
    for (std::int64_t j = 0; j < l.num_bearings; ++j) {
        std::string name = "bearing_" + std::to_string(j);
        c.emplace_back(
            MakeBox{name, {-bw, -bd, 0}, {dims::kBearingWidth, dims::kBearingDepth, dims::kBearingHeight}});
        c.emplace_back(Place{name, {l.bearing_center_x(j), 0, l.total_height() - dims::kBearingHeight}});
    }
    return s;
}

Bounds3 Solid::bounds() const {
    if (kind == Kind::Box) return {origin, origin + extents};
    const Vec3 ax = unit(axis);
    const Vec3 radial = Vec3{1, 1, 1} - ax;
    const Vec3 lo = origin - radius * radial;
    const Vec3 hi = origin + radius * radial + height * ax;
    return {lo, hi};
}

Volume Solid::volume() const {
    if (kind == Kind::Box) return {extents.x * extents.y * extents.z, 0};
    return {0, radius * radius * height};
}

Bounds3 SolidAssembly::bounds() const {
    if (solids.empty()) return {};
    Bounds3 b = solids.front().bounds();
    for (const auto& s : solids) {
        Bounds3 o = s.bounds();
        b.min = {std::min(b.min.x, o.min.x), std::min(b.min.y, o.min.y), std::min(b.min.z, o.min.z)};
        b.max = {std::max(b.max.x, o.max.x), std::max(b.max.y, o.max.y), std::max(b.max.z, o.max.z)};
    }
    return b;
}

Volume SolidAssembly::volume() const {
    Volume v;
    for (const auto& s : solids) {
        Volume o = s.volume();
        v.exact += o.exact;
        v.pi_coefficient += o.pi_coefficient;
    }
    return v;
}

const Solid* SolidAssembly::find(std::string_view name) const {
    for (const auto& s : solids) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

SolidAssembly interpret(const ModelingScript& script) {
    SolidAssembly a;
    std::map<std::string, std::size_t> index;
    for (const auto& cmd : script.commands) {
        std::visit(
            [&](const auto& c) {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, Place>) {
                    auto it = index.find(c.name);
                    if (it == index.end()) throw UnknownReference(c.name);
                    Solid& s = a.solids[it->second];
                    s.origin = s.origin + c.translation;
                } else {
                    if (index.count(c.name)) throw DuplicateName(c.name);
                    Solid s;
                    s.name = c.name;
                    if constexpr (std::is_same_v<T, MakeBox>) {
                        if (c.extents.x <= 0 || c.extents.y <= 0 || c.extents.z <= 0) throw NonPositiveExtent(c.name);
                        s.kind = Solid::Kind::Box;
                        s.origin = c.origin;
                        s.extents = c.extents;
                    } else {
                        if (c.radius <= 0 || c.height <= 0) throw NonPositiveExtent(c.name);
                        s.kind = Solid::Kind::Cylinder;
                        s.origin = c.base_center;
                        s.radius = c.radius;
                        s.height = c.height;
                        s.axis = c.axis;
                    }
                    index.emplace(c.name, a.solids.size());
                    a.solids.push_back(std::move(s));
                }
            },
            cmd);
    }
    if (a.solids.empty()) throw Error("script declares no solids");
    return a;
}

}  // namespace piergen
