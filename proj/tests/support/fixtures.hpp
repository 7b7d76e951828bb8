#pragma once

#include <cstdint>
#include <string>

#include "piergen/dataset.hpp"
#include "piergen/sampler.hpp"
#include "piergen/schema.hpp"

namespace fixture {

inline const piergen::DesignSpace& space() {
    static const piergen::DesignSpace s = piergen::default_schema();
    return s;
}

inline piergen::ParameterVector sampled(std::uint64_t seed, std::uint64_t index) {
    piergen::SamplerConfig cfg;
    cfg.seed = seed;
    cfg.space = &space();
    return piergen::sample(cfg, index);
}

/// The worked example vector used across the module examples.
inline piergen::ParameterVector worked_example() {
    piergen::ParameterVector partial(space().schema.version());
    partial.set("cap_beam_cross_dim", 12000);
    partial.set("cap_beam_height", 1800);
    partial.set("pier_column_cross_dim", 1200);
    partial.set("pier_column_height", 8000);
    partial.set("pile_spacing", 4000);
    partial.set("pile_cap_height", 2000);
    partial.set("num_pier_columns", 2);
    partial.set("num_piles", 3);
    partial.set("num_bearings", 2);
    return piergen::eval_composites(partial, space().formulas);
}

/// Manifest row with placeholder file entries; enough for instance generation.
inline piergen::SampleManifest manifest_of(const piergen::ParameterVector& v, std::uint64_t index) {
    piergen::SampleManifest m;
    m.sample_id = piergen::sample_id_for(index);
    m.index = index;
    m.schema_version = v.schema_version();
    const std::string dir = "samples/" + m.sample_id + "/";
    m.parameters = {dir + "parameters.json", "", 0};
    for (const char* view : {"front", "top", "side"}) m.dxf.push_back({dir + view + ".dxf", "", 0});
    for (const char* view : {"front", "top", "side", "sheet"}) m.png.push_back({dir + view + ".png", "", 0});
    m.script = {dir + "model.script", "", 0};
    m.step = {dir + "model.step", "", 0};
    m.brep = {dir + "model.brep", "", 0};
    m.truth = v;
    return m;
}

}  // namespace fixture
