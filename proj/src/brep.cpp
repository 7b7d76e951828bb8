#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include "piergen/solids.hpp"

namespace piergen {

bool BRepShell::watertight() const {
    std::vector<int> forward(edges.size(), 0);
    std::vector<int> backward(edges.size(), 0);
    for (const auto& f : faces) {
        for (auto [e, fwd] : f.loop) {
            if (e < 0 || static_cast<std::size_t>(e) >= edges.size()) return false;
            ++(fwd ? forward : backward)[static_cast<std::size_t>(e)];
        }
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (forward[i] != 1 || backward[i] != 1) return false;
    }
    return true;
}

namespace {

// Orthonormal frame (u, v, w) with w along the axis and u x v = w.
struct Frame {
    Vec3 u, v, w;
};

Frame frame_for(Axis a) {
    switch (a) {
        case Axis::X: return {unit(Axis::Y), unit(Axis::Z), unit(Axis::X)};
        case Axis::Y: return {unit(Axis::Z), unit(Axis::X), unit(Axis::Y)};
        case Axis::Z: break;
    }
    return {unit(Axis::X), unit(Axis::Y), unit(Axis::Z)};
}

BRepShell box_shell(const Solid& s) {
    BRepShell sh;
    sh.name = s.name;
    sh.kind = Solid::Kind::Box;
    for (int i = 0; i < 8; ++i) {
        sh.vertices.push_back({s.origin.x + ((i & 1) ? s.extents.x : 0), s.origin.y + ((i & 2) ? s.extents.y : 0),
                               s.origin.z + ((i & 4) ? s.extents.z : 0)});
    }
    // Edges join vertices differing in exactly one bit, always low -> high.
    std::map<std::pair<int, int>, int> edge_of;
    for (int a = 0; a < 8; ++a) {
        for (int bit = 1; bit < 8; bit <<= 1) {
            if (a & bit) continue;
            edge_of[{a, a | bit}] = static_cast<int>(sh.edges.size());
            sh.edges.push_back({BRepEdge::Curve::Line, a, a | bit, {}, 0, Axis::Z});
        }
    }
    struct FaceSpec {
        int v[4];
        Vec3 normal;
        int anchor;
    };
    const FaceSpec specs[6] = {
        {{0, 2, 3, 1}, {0, 0, -1}, 0}, {{4, 5, 7, 6}, {0, 0, 1}, 4},
        {{0, 1, 5, 4}, {0, -1, 0}, 0}, {{2, 6, 7, 3}, {0, 1, 0}, 2},
        {{0, 4, 6, 2}, {-1, 0, 0}, 0}, {{1, 3, 7, 5}, {1, 0, 0}, 1},
    };
    for (const auto& spec : specs) {
        BRepFace f;
        f.surface = BRepFace::Surface::Plane;
        f.origin = sh.vertices[static_cast<std::size_t>(spec.anchor)];
        f.normal = spec.normal;
        for (int k = 0; k < 4; ++k) {
            int a = spec.v[k];
            int b = spec.v[(k + 1) % 4];
            bool fwd = a < b;
            f.loop.emplace_back(edge_of.at(fwd ? std::pair{a, b} : std::pair{b, a}), fwd);
        }
        sh.faces.push_back(std::move(f));
    }
    return sh;
}

BRepShell cylinder_shell(const Solid& s) {
    BRepShell sh;
    sh.name = s.name;
    sh.kind = Solid::Kind::Cylinder;
    const Frame fr = frame_for(s.axis);
    const Vec3 bottom = s.origin;
    const Vec3 top = s.origin + s.height * fr.w;
    sh.vertices = {bottom + s.radius * fr.u, top + s.radius * fr.u};
    sh.edges.push_back({BRepEdge::Curve::Circle, 0, 0, bottom, s.radius, s.axis});
    sh.edges.push_back({BRepEdge::Curve::Circle, 1, 1, top, s.radius, s.axis});
    sh.edges.push_back({BRepEdge::Curve::Line, 0, 1, {}, 0, s.axis});

    BRepFace bottom_cap{BRepFace::Surface::Plane, bottom, Vec3{} - fr.w, 0, {{0, false}}};
    BRepFace top_cap{BRepFace::Surface::Plane, top, fr.w, 0, {{1, true}}};
    BRepFace lateral{BRepFace::Surface::Cylinder, bottom, fr.w, s.radius, {{0, true}, {2, true}, {1, false}, {2, false}}};
    sh.faces = {bottom_cap, top_cap, lateral};
    return sh;
}

}  // namespace

BRepModel build_brep(const SolidAssembly& a) {
    BRepModel m;
    for (const auto& s : a.solids) {
        m.shells.push_back(s.kind == Solid::Kind::Box ? box_shell(s) : cylinder_shell(s));
    }
    return m;
}

namespace {

std::string vec_str(Vec3 v) {
    return std::to_string(v.x) + ' ' + std::to_string(v.y) + ' ' + std::to_string(v.z);
}

char axis_char(Axis a) { return a == Axis::X ? 'x' : a == Axis::Y ? 'y' : 'z'; }

}  // namespace

std::string write_brep_dump(const SolidAssembly& a) {
    const BRepModel m = build_brep(a);
    std::ostringstream os;
    os << "piergen-brep 1\n";
    os << "shells " << m.shells.size() << '\n';
    for (const auto& sh : m.shells) {
        os << "shell " << sh.name << ' ' << (sh.kind == Solid::Kind::Box ? "box" : "cylinder") << '\n';
        for (std::size_t i = 0; i < sh.vertices.size(); ++i) {
            os << "v " << i << ' ' << vec_str(sh.vertices[i]) << '\n';
        }
        for (std::size_t i = 0; i < sh.edges.size(); ++i) {
            const auto& e = sh.edges[i];
            os << "e " << i << ' ';
            if (e.curve == BRepEdge::Curve::Line) {
                os << "line " << e.start << ' ' << e.end;
            } else {
                os << "circle " << e.start << ' ' << e.end << " c " << vec_str(e.center) << " r " << e.radius
                   << " axis " << axis_char(e.axis);
            }
            os << '\n';
        }
        for (std::size_t i = 0; i < sh.faces.size(); ++i) {
            const auto& f = sh.faces[i];
            os << "f " << i << ' ' << (f.surface == BRepFace::Surface::Plane ? "plane" : "cylinder") << " o "
               << vec_str(f.origin) << " n " << vec_str(f.normal);
            if (f.surface == BRepFace::Surface::Cylinder) os << " r " << f.radius;
            os << " loop";
            for (auto [e, fwd] : f.loop) os << ' ' << (fwd ? '+' : '-') << e;
            os << '\n';
        }
        os << "euler V=" << sh.vertices.size() << " E=" << sh.edges.size() << " F=" << sh.faces.size()
           << " chi=" << sh.euler_characteristic() << '\n';
        os << "watertight " << (sh.watertight() ? "yes" : "no") << '\n';
    }
    return os.str();
}

namespace {

std::string step_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        out += c;
        if (c == '\'') out += '\'';
    }
    return out;
}

std::string real(std::int64_t v) { return std::to_string(v) + "."; }

class StepWriter {
public:
    int add(const std::string& body) {
        int id = next_++;
        data_ += '#' + std::to_string(id) + '=' + body + ";\n";
        return id;
    }
    static std::string ref(int id) { return '#' + std::to_string(id); }

    int point(Vec3 p) {
        return add("CARTESIAN_POINT('',(" + real(p.x) + ',' + real(p.y) + ',' + real(p.z) + "))");
    }
    int direction(Vec3 d) {
        return add("DIRECTION('',(" + real(d.x) + ',' + real(d.y) + ',' + real(d.z) + "))");
    }
    int placement(Vec3 origin, Vec3 axis, Vec3 ref_dir) {
        int p = point(origin);
        int a = direction(axis);
        int r = direction(ref_dir);
        return add("AXIS2_PLACEMENT_3D(''," + ref(p) + ',' + ref(a) + ',' + ref(r) + ')');
    }

    const std::string& data() const { return data_; }

private:
    int next_ = 1;
    std::string data_;
};

// Any unit vector perpendicular to an axis-aligned normal.
Vec3 perpendicular(Vec3 n) {
    if (n.x != 0) return {0, 1, 0};
    if (n.y != 0) return {0, 0, 1};
    return {1, 0, 0};
}

Vec3 length_normalized(Vec3 d) {
    auto sgn = [](std::int64_t x) -> std::int64_t { return (x > 0) - (x < 0); };
    return {sgn(d.x), sgn(d.y), sgn(d.z)};
}

std::int64_t axis_length(Vec3 d) { return std::max({std::abs(d.x), std::abs(d.y), std::abs(d.z)}); }

int write_shell(StepWriter& w, const BRepShell& sh) {
    std::vector<int> vertex_ids;
    for (const auto& v : sh.vertices) {
        int p = w.point(v);
        vertex_ids.push_back(w.add("VERTEX_POINT(''," + StepWriter::ref(p) + ')'));
    }
    std::vector<int> edge_ids;
    for (const auto& e : sh.edges) {
        int curve = 0;
        const Vec3 a = sh.vertices[static_cast<std::size_t>(e.start)];
        if (e.curve == BRepEdge::Curve::Line) {
            const Vec3 d = sh.vertices[static_cast<std::size_t>(e.end)] - a;
            int p = w.point(a);
            int dir = w.direction(length_normalized(d));
            int vec = w.add("VECTOR(''," + StepWriter::ref(dir) + ',' + real(axis_length(d)) + ')');
            curve = w.add("LINE(''," + StepWriter::ref(p) + ',' + StepWriter::ref(vec) + ')');
        } else {
            const Frame fr = frame_for(e.axis);
            int pl = w.placement(e.center, fr.w, fr.u);
            curve = w.add("CIRCLE(''," + StepWriter::ref(pl) + ',' + real(e.radius) + ')');
        }
        edge_ids.push_back(w.add("EDGE_CURVE(''," + StepWriter::ref(vertex_ids[static_cast<std::size_t>(e.start)]) +
                                 ',' + StepWriter::ref(vertex_ids[static_cast<std::size_t>(e.end)]) + ',' +
                                 StepWriter::ref(curve) + ",.T.)"));
    }
    std::vector<int> face_ids;
    for (const auto& f : sh.faces) {
        std::string oriented;
        for (auto [e, fwd] : f.loop) {
            int oe = w.add("ORIENTED_EDGE('',*,*," + StepWriter::ref(edge_ids[static_cast<std::size_t>(e)]) + ',' +
                           (fwd ? ".T." : ".F.") + ')');
            if (!oriented.empty()) oriented += ',';
            oriented += StepWriter::ref(oe);
        }
        int loop = w.add("EDGE_LOOP('',(" + oriented + "))");
        int bound = w.add("FACE_OUTER_BOUND(''," + StepWriter::ref(loop) + ",.T.)");
        int surface = 0;
        if (f.surface == BRepFace::Surface::Plane) {
            int pl = w.placement(f.origin, f.normal, perpendicular(f.normal));
            surface = w.add("PLANE(''," + StepWriter::ref(pl) + ')');
        } else {
            Axis ax = f.normal.x ? Axis::X : f.normal.y ? Axis::Y : Axis::Z;
            int pl = w.placement(f.origin, f.normal, frame_for(ax).u);
            surface = w.add("CYLINDRICAL_SURFACE(''," + StepWriter::ref(pl) + ',' + real(f.radius) + ')');
        }
        face_ids.push_back(
            w.add("ADVANCED_FACE('',(" + StepWriter::ref(bound) + ")," + StepWriter::ref(surface) + ",.T.)"));
    }
    std::string faces;
    for (int id : face_ids) {
        if (!faces.empty()) faces += ',';
        faces += StepWriter::ref(id);
    }
    int shell = w.add("CLOSED_SHELL('',(" + faces + "))");
    return w.add("MANIFOLD_SOLID_BREP('" + step_escape(sh.name) + "'," + StepWriter::ref(shell) + ')');
}

}  // namespace

std::string write_step(const SolidAssembly& a, std::string_view product_name) {
    const BRepModel m = build_brep(a);
    const std::string name = step_escape(product_name);
    StepWriter w;

    int app_ctx = w.add("APPLICATION_CONTEXT('configuration controlled 3D designs of mechanical parts and assemblies')");
    w.add("APPLICATION_PROTOCOL_DEFINITION('international standard','config_control_design',1994," +
          StepWriter::ref(app_ctx) + ')');
    int mech_ctx = w.add("MECHANICAL_CONTEXT(''," + StepWriter::ref(app_ctx) + ",'mechanical')");
    int product = w.add("PRODUCT('" + name + "','" + name + "',''," + "(" + StepWriter::ref(mech_ctx) + "))");
    int formation = w.add("PRODUCT_DEFINITION_FORMATION('1',''," + StepWriter::ref(product) + ')');
    int design_ctx = w.add("DESIGN_CONTEXT(''," + StepWriter::ref(app_ctx) + ",'design')");
    int definition = w.add("PRODUCT_DEFINITION('design',''," + StepWriter::ref(formation) + ',' +
                           StepWriter::ref(design_ctx) + ')');
    int shape = w.add("PRODUCT_DEFINITION_SHAPE('',''," + StepWriter::ref(definition) + ')');

    int length_unit = w.add("(LENGTH_UNIT()NAMED_UNIT(*)SI_UNIT(.MILLI.,.METRE.))");
    int angle_unit = w.add("(NAMED_UNIT(*)PLANE_ANGLE_UNIT()SI_UNIT($,.RADIAN.))");
    int solid_angle_unit = w.add("(NAMED_UNIT(*)SI_UNIT($,.STERADIAN.)SOLID_ANGLE_UNIT())");
    int uncertainty = w.add("UNCERTAINTY_MEASURE_WITH_UNIT(LENGTH_MEASURE(1.E-03)," + StepWriter::ref(length_unit) +
                            ",'distance_accuracy_value','')");
    int geom_ctx = w.add("(GEOMETRIC_REPRESENTATION_CONTEXT(3)GLOBAL_UNCERTAINTY_ASSIGNED_CONTEXT((" +
                         StepWriter::ref(uncertainty) + "))GLOBAL_UNIT_ASSIGNED_CONTEXT((" +
                         StepWriter::ref(length_unit) + ',' + StepWriter::ref(angle_unit) + ',' +
                         StepWriter::ref(solid_angle_unit) + "))REPRESENTATION_CONTEXT('',''))");

    int world = w.placement({0, 0, 0}, {0, 0, 1}, {1, 0, 0});
    std::string items = StepWriter::ref(world);
    for (const auto& sh : m.shells) items += ',' + StepWriter::ref(write_shell(w, sh));
    int rep = w.add("ADVANCED_BREP_SHAPE_REPRESENTATION('" + name + "',(" + items + ")," + StepWriter::ref(geom_ctx) +
                    ')');
    w.add("SHAPE_DEFINITION_REPRESENTATION(" + StepWriter::ref(shape) + ',' + StepWriter::ref(rep) + ')');

    std::string out;
    out += "ISO-10303-21;\n";
    out += "HEADER;\n";
    out += "FILE_DESCRIPTION(('piergen solid assembly'),'2;1');\n";
    out += "FILE_NAME('" + name + ".step','2000-01-01T00:00:00',(''),(''),'piergen','piergen','');\n";
    out += "FILE_SCHEMA(('CONFIG_CONTROL_DESIGN'));\n";
    out += "ENDSEC;\n";
    out += "DATA;\n";
    out += w.data();
    out += "ENDSEC;\n";
    out += "END-ISO-10303-21;\n";
    return out;
}

}  // namespace piergen
