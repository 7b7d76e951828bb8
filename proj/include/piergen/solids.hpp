#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "piergen/schema.hpp"

namespace piergen {

struct Vec3 {
    std::int64_t x = 0, y = 0, z = 0;
    friend bool operator==(const Vec3&, const Vec3&) = default;
    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(std::int64_t k, Vec3 a) { return {k * a.x, k * a.y, k * a.z}; }
};

enum class Axis { X, Y, Z };
Vec3 unit(Axis axis);

// Modeling script commands (integer millimeters).
struct MakeBox {
    std::string name;
    Vec3 origin;   // minimum corner
    Vec3 extents;  // width (x), depth (y), height (z)
    friend bool operator==(const MakeBox&, const MakeBox&) = default;
};
struct MakeCylinder {
    std::string name;
    Vec3 base_center;
    std::int64_t radius = 0;
    std::int64_t height = 0;
    Axis axis = Axis::Z;
    friend bool operator==(const MakeCylinder&, const MakeCylinder&) = default;
};
struct Place {
    std::string name;
    Vec3 translation;
    friend bool operator==(const Place&, const Place&) = default;
};
using Command = std::variant<MakeBox, MakeCylinder, Place>;

struct ModelingScript {
    std::vector<Command> commands;
    friend bool operator==(const ModelingScript&, const ModelingScript&) = default;
};

/// One command per line: `box NAME ox oy oz w d h`,
/// `cylinder NAME cx cy cz r h AXIS`, `place NAME dx dy dz`; `#` starts a comment.
std::string format_script(const ModelingScript& script);
ModelingScript parse_script(std::string_view text);

/// Pile cap, columns, cap beam, pile heads and bearings of the pier, in that
/// order. Repeated parts are declared at a local origin and then placed.
ModelingScript script_from_vector(const ParameterVector& v);

struct Bounds3 {
    Vec3 min;
    Vec3 max;
    Vec3 size() const { return max - min; }
    friend bool operator==(const Bounds3&, const Bounds3&) = default;
};

/// exact + pi_coefficient * pi cubic millimeters.
struct Volume {
    std::int64_t exact = 0;
    std::int64_t pi_coefficient = 0;
    friend bool operator==(const Volume&, const Volume&) = default;
};

struct Solid {
    enum class Kind { Box, Cylinder };
    std::string name;
    Kind kind = Kind::Box;
    Vec3 origin;   // box minimum corner, or cylinder base centre (world)
    Vec3 extents;  // box only
    std::int64_t radius = 0;
    std::int64_t height = 0;
    Axis axis = Axis::Z;

    Bounds3 bounds() const;
    Volume volume() const;
};

struct SolidAssembly {
    std::vector<Solid> solids;

    Bounds3 bounds() const;
    Volume volume() const;
    const Solid* find(std::string_view name) const;
};

/// Executes the script. Throws DuplicateName, UnknownReference, NonPositiveExtent.
SolidAssembly interpret(const ModelingScript& script);

// Boundary representation.

struct BRepEdge {
    enum class Curve { Line, Circle };
    Curve curve = Curve::Line;
    int start = 0;  // vertex index
    int end = 0;
    Vec3 center;    // circle only
    std::int64_t radius = 0;
    Axis axis = Axis::Z;
};

struct BRepFace {
    enum class Surface { Plane, Cylinder };
    Surface surface = Surface::Plane;
    Vec3 origin;             // point on plane, or axis base point
    Vec3 normal;             // outward plane normal, or cylinder axis
    std::int64_t radius = 0;  // cylinder only
    /// Outer loop: (edge index, traversed start->end).
    std::vector<std::pair<int, bool>> loop;
};

struct BRepShell {
    std::string name;
    Solid::Kind kind = Solid::Kind::Box;
    std::vector<Vec3> vertices;
    std::vector<BRepEdge> edges;
    std::vector<BRepFace> faces;

    long euler_characteristic() const {
        return static_cast<long>(vertices.size()) - static_cast<long>(edges.size()) +
               static_cast<long>(faces.size());
    }
    /// Every edge is used by exactly two face sides, once in each direction.
    bool watertight() const;
};

struct BRepModel {
    std::vector<BRepShell> shells;
};

BRepModel build_brep(const SolidAssembly& a);

/// ISO 10303-21 file with one MANIFOLD_SOLID_BREP per solid.
std::string write_step(const SolidAssembly& a, std::string_view product_name = "pier");

/// Plain-text dump of the B-Rep topology with Euler and watertightness checks per shell.
std::string write_brep_dump(const SolidAssembly& a);

}  // namespace piergen
