#pragma once

#include <cstdint>
#include <vector>

#include "piergen/schema.hpp"

namespace piergen {

struct SamplerConfig {
    std::uint64_t seed = 0;
    std::uint64_t max_rejections_per_sample = 10'000;
    const DesignSpace* space = nullptr;  // must outlive the config
};

/// Draws the index-th design for the configured seed.
///
/// Each non-composite value is drawn uniformly from its integer grid; the
/// candidate is rejected if a composite fails to evaluate (non-integral or
/// non-positive) or any constraint is violated. The result is uniform over the
/// accepted region and depends only on (seed, index).
ParameterVector sample(const SamplerConfig& config, std::uint64_t index);

/// `sample(config, i)` for i in [0, count).
std::vector<ParameterVector> sample_batch(const SamplerConfig& config, std::uint64_t count);

}  // namespace piergen
