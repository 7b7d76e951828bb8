#include "piergen/sampler.hpp"

#include "piergen/errors.hpp"
#include "piergen/rng.hpp"

namespace piergen {

namespace {
constexpr std::uint64_t kSamplerStream = hash_string("sampler");
}

ParameterVector sample(const SamplerConfig& config, std::uint64_t index) {
    if (config.space == nullptr) throw Error("sampler config has no design space");
    if (config.max_rejections_per_sample < 1) throw Error("max_rejections_per_sample must be >= 1");
    const DesignSpace& space = *config.space;

    CounterRng rng(config.seed, kSamplerStream, index);
    for (std::uint64_t attempt = 0; attempt < config.max_rejections_per_sample; ++attempt) {
        ParameterVector candidate(space.schema.version());
        for (const auto& def : space.schema.defs()) {
            if (def.kind == ParameterKind::Composite) continue;
            std::int64_t k = rng.uniform_int(0, def.grid_size() - 1);
            candidate.set(def.name, def.sample_range->min + k * def.grid_step);
        }
        ParameterVector full;
        try {
            full = eval_composites(candidate, space.formulas);
        } catch (const NonIntegerResult&) {
            continue;
        } catch (const NonPositiveResult&) {
            continue;
        }
        if (check_constraints(full, space.constraints).empty()) return full;
    }
    throw RejectionBudgetExhausted(index);
}

std::vector<ParameterVector> sample_batch(const SamplerConfig& config, std::uint64_t count) {
    std::vector<ParameterVector> out;
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) out.push_back(sample(config, i));
    return out;
}

}  // namespace piergen
