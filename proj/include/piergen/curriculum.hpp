#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "piergen/dataset.hpp"
#include "piergen/rng.hpp"
#include "piergen/schema.hpp"

namespace piergen {

enum class TaskKind {
    Dichotomous,
    MultipleChoice,
    CoTParameterization,
    FullParamList,
    ParamValidation,
    ViewMatching,
    ComponentCounting,
};
inline constexpr TaskKind kAllTaskKinds[] = {
    TaskKind::Dichotomous,   TaskKind::MultipleChoice, TaskKind::CoTParameterization, TaskKind::FullParamList,
    TaskKind::ParamValidation, TaskKind::ViewMatching, TaskKind::ComponentCounting,
};
std::string_view to_string(TaskKind kind);
/// Accepts the names from `to_string` and the aliases `1`, `2`, `3`.
TaskKind parse_task_kind(std::string_view text);

/// One perturbed entry.
struct Edit {
    std::string name;
    std::int64_t from = 0;
    std::int64_t to = 0;
    friend bool operator==(const Edit&, const Edit&) = default;
};
using Corruption = std::vector<Edit>;

/// Applies the edits; throws Error if an entry does not hold the recorded `from` value.
ParameterVector replay(const ParameterVector& v, const Corruption& edits);

struct Corrupted {
    ParameterVector vector;
    Corruption edits;  // in the order applied
};

/// Perturbs one entry so that it differs from its current value.
///
/// Counts move by one within their sampling range. Millimetre values move by
/// a nonzero multiple of the grid step of at most 30% of the value and stay
/// positive; values too small for one grid step use a tenth of it (down to
/// 1 mm). Returns nullopt when a count has no room to move.
std::optional<std::int64_t> perturb_value(const ParameterDef& def, std::int64_t value, CounterRng& rng);

/// Perturbs exactly `n` distinct entries chosen uniformly among `candidates`
/// (all schema names when empty). An entry that cannot move is replaced by
/// another candidate; throws InfeasibleCorruption when too few can move.
Corrupted corrupt(const ParameterVector& v, std::size_t n, const ParameterSchema& schema, CounterRng& rng,
                  const std::vector<std::string>& candidates = {});

struct Task1Config {
    double correct_fraction = 0.5;
    std::int64_t n_min = 1;
    std::int64_t n_max = 15;
    void validate() const;
};

struct Task2Config {
    double p_mean = 5.0;
    double p_sigma = 2.0;
    std::int64_t p_min = 1;
    std::int64_t p_max = 10;
    double q_mean = 2.0;
    double q_sigma = 1.0;
    std::int64_t q_min = 1;  // upper clamp is (parameter count - p)
    std::int64_t num_options = 4;
    std::int64_t min_correct = 1;
    std::int64_t max_correct = 2;
    void validate(std::size_t parameter_count) const;
};

struct ImageRef {
    std::string sample_id;
    std::string path;
    std::string caption;
    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct ChoiceOption {
    ParameterVector values;
    bool correct = false;
    Corruption edits;  // replaying on the ground truth reproduces `values`
};

/// One composite in a chain-of-thought target.
struct CotStep {
    std::string parameter;
    std::vector<std::pair<std::string, std::int64_t>> factors;
    std::string formula;      // `name = expression`
    std::string substituted;  // expression with factor values in place of names
    std::int64_t result = 0;
};

struct LabelTruth {
    std::string label;  // yes/no or same/different
};
struct OptionTruth {
    std::vector<std::size_t> correct;
};
struct VectorTruth {
    ParameterVector values;
};
struct VerdictTruth {
    std::map<std::string, bool> entry_ok;
};
struct CountTruth {
    std::string component;
    std::string parameter;
    std::int64_t value = 0;
};
using GroundTruth = std::variant<LabelTruth, OptionTruth, VectorTruth, VerdictTruth, CountTruth>;

struct InstructionInstance {
    std::string instance_id;
    std::string sample_id;
    std::string partner_sample_id;  // view matching only
    TaskKind kind = TaskKind::Dichotomous;
    std::vector<ImageRef> images;
    std::string prompt;
    ParameterVector listed;            // candidate list shown in the prompt (dichotomous, validation)
    std::vector<std::string> masked;   // multiple choice
    std::vector<ChoiceOption> options;  // multiple choice
    std::vector<CotStep> cot;
    Corruption corruption;             // edits behind `listed`
    std::map<std::string, std::int64_t> meta;  // drawn counts such as n, p, q
    GroundTruth truth;
};

/// Stream for one (run seed, sample, task) triple.
CounterRng instance_rng(std::uint64_t seed, std::string_view sample_id, TaskKind kind);

InstructionInstance gen_task1(const SampleManifest& s, const ParameterSchema& schema, const Task1Config& cfg,
                              CounterRng& rng);
InstructionInstance gen_task2(const SampleManifest& s, const ParameterSchema& schema, const Task2Config& cfg,
                              CounterRng& rng);
InstructionInstance gen_task3_cot(const SampleManifest& s, const DesignSpace& space);

/// FullParamList, ParamValidation or ComponentCounting on one sample.
InstructionInstance gen_posttune(const SampleManifest& s, TaskKind kind, const DesignSpace& space,
                                 const Task1Config& validation_cfg, CounterRng& rng);
/// Two views of `a` when both arguments are the same sample, otherwise one
/// view from each; labelled `same` iff the parameter vectors are equal.
InstructionInstance gen_view_matching(const SampleManifest& a, const SampleManifest& b, CounterRng& rng);

enum class PromptFormat { TestImageOnly, PlusReferenceImage, PlusAnsweredPair, PlusAttributeExplanation };
inline constexpr PromptFormat kAllPromptFormats[] = {PromptFormat::TestImageOnly, PromptFormat::PlusReferenceImage,
                                                     PromptFormat::PlusAnsweredPair,
                                                     PromptFormat::PlusAttributeExplanation};
std::string_view to_string(PromptFormat f);
PromptFormat parse_prompt_format(std::string_view text);
bool needs_exemplar(PromptFormat f);

struct PromptConfig {
    PromptFormat format = PromptFormat::TestImageOnly;
    bool reasoning_guidance = false;
};

struct PromptBundle {
    std::string text;
    std::vector<ImageRef> images;
    std::string exemplar_id;  // empty when no exemplar is used
};

/// Identifies the bundled guidance templates.
inline constexpr std::string_view kGuidanceTemplateVersion = "guidance-v1";
/// Step list appended when reasoning guidance is on.
const std::vector<std::string>& guidance_steps(PromptFormat f);

/// Throws MissingExemplar when the format needs an exemplar and none is
/// given, and ExemplarLeak when the exemplar is one of the instance's samples.
PromptBundle build_prompt(const InstructionInstance& inst, const PromptConfig& cfg, const ParameterSchema& schema,
                          const SampleManifest* exemplar = nullptr);

struct SplitAssignment {
    std::vector<std::uint64_t> train;   // ascending
    std::vector<std::uint64_t> test;    // ascending
    std::vector<std::uint64_t> warmup;  // ascending, subset of train
};

/// Deterministic shuffle of [0, count); the train share is rounded to the nearest integer.
SplitAssignment split_dataset(std::uint64_t count, double train_ratio, double test_ratio, double warmup_fraction,
                              std::uint64_t seed);

Json to_json(const InstructionInstance& inst, const ParameterSchema& schema);
/// Corpus record: instance fields plus the assembled prompt bundle.
Json corpus_record(const InstructionInstance& inst, const PromptConfig& cfg, const PromptBundle& bundle,
                   const ParameterSchema& schema);
InstructionInstance instance_from_json(const Json& j);

}  // namespace piergen
