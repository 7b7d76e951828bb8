#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "piergen/curriculum.hpp"
#include "piergen/dataset.hpp"
#include "piergen/errors.hpp"
#include "piergen/io.hpp"
#include "piergen/raster.hpp"
#include "piergen/rewards.hpp"

namespace piergen {

/// File system failure; the CLI maps it to exit status 3.
class IoError : public Error {
public:
    using Error::Error;
};

struct CurriculumSettings {
    std::vector<TaskKind> tasks = {TaskKind::Dichotomous, TaskKind::MultipleChoice, TaskKind::CoTParameterization};
    std::vector<PromptFormat> formats = {PromptFormat::TestImageOnly};
    std::vector<bool> guidance = {false};
    bool emit_eval = true;  // prompts for the test split
};

/// Everything a run needs. Sources apply in order: defaults, config file, flags.
struct RunConfig {
    std::uint64_t seed = 42;
    std::uint64_t count = 100;
    std::filesystem::path out = "out";
    unsigned jobs = 1;
    std::uint64_t max_rejections_per_sample = 10'000;
    double train_ratio = 0.8;
    double test_ratio = 0.2;
    double warmup_fraction = 0.05;
    RasterConfig raster;
    Task1Config task1;
    Task2Config task2;
    DifficultyConfig difficulty;
    CurriculumSettings curriculum;
    std::optional<std::filesystem::path> design_space_file;

    /// Overlays the keys present in `j`; unknown keys are an error.
    void apply_json(const Json& j);
    void validate() const;
    /// Resolved configuration without the thread count, which never affects output.
    Json to_json() const;
};

DesignSpace load_design_space(const RunConfig& cfg);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view bytes);

struct GenerateResult {
    std::vector<SampleManifest> samples;
    SplitAssignment split;
};

/// Writes samples/, manifest.jsonl, split.json, design_space.json and
/// run_config.json under cfg.out. Output bytes do not depend on cfg.jobs.
GenerateResult generate_dataset(const RunConfig& cfg);

struct CurriculumResult {
    std::vector<std::filesystem::path> corpora;  // relative to cfg.out
    std::vector<std::filesystem::path> warmup;
    std::vector<std::filesystem::path> eval;
};

/// Reads a generated dataset and writes corpora/, corpora/warmup/ and eval/.
/// Training corpora and exemplars only use train-split samples.
CurriculumResult emit_curriculum(const RunConfig& cfg);

/// `{task}_{format}_{guided|plain}.jsonl`
std::string corpus_file_name(TaskKind task, const PromptConfig& p);

Json split_to_json(const SplitAssignment& s);
SplitAssignment split_from_json(const Json& j);

}  // namespace piergen
