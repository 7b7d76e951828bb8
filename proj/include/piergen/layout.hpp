#pragma once

#include <cstdint>

#include "piergen/schema.hpp"

namespace piergen {

/// Fixed component sizes that are not schema parameters (millimeters).
namespace dims {
inline constexpr std::int64_t kPileDiameter = 800;
inline constexpr std::int64_t kPileRadius = kPileDiameter / 2;
inline constexpr std::int64_t kCapBeamDepth = 2200;
inline constexpr std::int64_t kPileCapDepth = 3200;
inline constexpr std::int64_t kBearingWidth = 400;
inline constexpr std::int64_t kBearingDepth = 400;
inline constexpr std::int64_t kBearingHeight = 200;
}  // namespace dims

/// Resolved positions of every pier component, shared by the 2D views and
/// the 3D script so both are derived from identical arithmetic.
///
/// Cross-bridge axis x starts at the left face of the cap beam; the
/// along-bridge axis y is centred on the pier; z (or drawing y) starts at the
/// underside of the pile cap.
struct PierLayout {
    std::int64_t cap_beam_width = 0;
    std::int64_t cap_beam_height = 0;
    std::int64_t column_width = 0;
    std::int64_t column_height = 0;
    std::int64_t pile_spacing = 0;
    std::int64_t pile_cap_height = 0;
    std::int64_t num_columns = 0;
    std::int64_t num_piles = 0;
    std::int64_t num_bearings = 0;
    std::int64_t column_pitch = 0;  // centre-to-centre
    std::int64_t column_envelope = 0;
    std::int64_t cap_beam_overhang = 0;
    std::int64_t bearing_pitch = 0;
    std::int64_t pile_row_extent = 0;

    std::int64_t pile_cap_x0 = 0;     // left edge of pile cap
    std::int64_t pile_cap_width = 0;  // pile row extent + one pile diameter

    std::int64_t column_base() const { return pile_cap_height; }
    std::int64_t cap_beam_base() const { return pile_cap_height + column_height; }
    std::int64_t total_height() const { return cap_beam_base() + cap_beam_height; }

    std::int64_t column_left(std::int64_t i) const { return cap_beam_overhang + i * column_pitch; }
    std::int64_t pile_center_x(std::int64_t k) const {
        return pile_cap_x0 + dims::kPileRadius + k * pile_spacing;
    }
    std::int64_t bearing_center_x(std::int64_t j) const { return (j + 1) * bearing_pitch; }

    /// Along-bridge start of a column (columns are square in plan).
    std::int64_t column_y0() const { return -(column_width / 2); }
};

/// Floor division for possibly negative numerators.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

/// Requires the default pier parameter names; throws UnknownParameter otherwise.
PierLayout layout_from_vector(const ParameterVector& v);

}  // namespace piergen
