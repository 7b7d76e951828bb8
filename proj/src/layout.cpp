#include "piergen/layout.hpp"

namespace piergen {

PierLayout layout_from_vector(const ParameterVector& v) {
    PierLayout l;
    l.cap_beam_width = v.at("cap_beam_cross_dim");
    l.cap_beam_height = v.at("cap_beam_height");
    l.column_width = v.at("pier_column_cross_dim");
    l.column_height = v.at("pier_column_height");
    l.pile_spacing = v.at("pile_spacing");
    l.pile_cap_height = v.at("pile_cap_height");
    l.num_columns = v.at("num_pier_columns");
    l.num_piles = v.at("num_piles");
    l.num_bearings = v.at("num_bearings");
    l.column_pitch = v.at("cross_bridge_pier_spacing");
    l.column_envelope = v.at("column_envelope_width");
    l.cap_beam_overhang = v.at("cap_beam_overhang");
    l.bearing_pitch = v.at("bearing_pitch");
    l.pile_row_extent = v.at("pile_row_extent");
    l.pile_cap_width = l.pile_row_extent + dims::kPileDiameter;
    l.pile_cap_x0 = floor_div(l.cap_beam_width - l.pile_cap_width, 2);
    return l;
}

}  // namespace piergen
