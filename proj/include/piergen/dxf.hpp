#pragma once

#include <string>
#include <string_view>

#include "piergen/drawing.hpp"

namespace piergen {

/// ASCII DXF for one view.
///
/// Dialect: a leading `999` comment naming the view, HEADER, TABLES (APPID
/// and the six semantic layers), ENTITIES (LINE, CIRCLE, LWPOLYLINE, TEXT),
/// EOF. Coordinates are integer millimeters. Primitive ids, annotation
/// parameter names and primitive links travel as `PIERGEN` extended data.
/// Output is byte-deterministic.
std::string write_dxf(const View& view);
std::string write_dxf(const Drawing& d, ViewId view);

/// Reads the dialect produced by write_dxf. Group-code order inside an entity
/// is not significant (LWPOLYLINE vertex order is). Throws MalformedDxf or
/// UnsupportedEntity.
View parse_dxf(std::string_view bytes);

/// SVG rendering of one view (debugging aid; y axis flipped to screen space).
std::string write_svg(const View& view);

}  // namespace piergen
