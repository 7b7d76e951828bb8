#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "piergen/curriculum.hpp"
#include "piergen/dataset.hpp"
#include "piergen/schema.hpp"

namespace piergen {

/// Reward for a yes/no judgment on a dichotomous instance: 1 when it matches
/// the instance label, else 0. Answers are trimmed and case-folded.
double r_p1(std::string_view answer, const InstructionInstance& inst);

struct ChoiceOutcome {
    std::set<std::size_t> selected;
    std::set<std::size_t> correct;
    std::set<std::size_t> incorrect;

    /// Checks the partition and selection invariants; throws Error.
    void validate() const;
};

/// 1 for the exact correct set, 0.2 for a nonempty proper subset of it, 0 otherwise.
double r_p2(const ChoiceOutcome& o);

enum class Difficulty { Easy, Medium, Hard };
std::string_view to_string(Difficulty d);

struct DifficultyConfig {
    double easy_threshold = 0.8;
    double hard_threshold = 0.2;
    double easy_reward = 1.0;
    double medium_reward = 1.5;
    double hard_reward = 2.0;
    double wrong_reward = 0.0;
    void validate() const;
    double reward(Difficulty d) const;
};

struct DifficultyMap {
    std::map<std::string, Difficulty> tiers;
    std::map<std::string, double> accuracy;
};

/// Above the easy threshold is Easy, below the hard threshold is Hard, both
/// boundaries are Medium.
DifficultyMap classify_difficulty(const std::map<std::string, double>& per_param_accuracy,
                                  const DifficultyConfig& cfg);

/// Raw predicted values keyed by parameter name.
using PredictionMap = std::map<std::string, std::string, std::less<>>;

/// Strips whitespace and a trailing `mm`; accepts integers and integral decimals such as `1200.0`.
std::optional<std::int64_t> canonicalize_value(std::string_view raw);

/// Tier reward summed over every truth entry whose prediction matches exactly.
double r_p3(const PredictionMap& pred, const ParameterVector& truth, const DifficultyMap& dm,
            const DifficultyConfig& cfg);

struct ScoreConfig {
    /// Accept |pred - truth| <= tol * |truth|; 0 means exact match.
    double relative_tolerance = 0.0;
};

/// Exact fraction with its floating value.
struct Ratio {
    std::uint64_t correct = 0;
    std::uint64_t total = 0;
    double value() const { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
    friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct Mismatch {
    std::string sample_id;
    std::string name;
    std::string predicted;  // `<missing>` when absent
    std::int64_t truth = 0;
};

struct PredictionRecord {
    std::string sample_id;
    PredictionMap values;
    std::size_t line = 0;
};

struct EvalReport {
    std::vector<std::pair<std::string, Ratio>> per_parameter;  // schema order
    std::vector<std::pair<ParameterKind, Ratio>> per_category;
    Ratio overall;
    std::size_t samples = 0;
    std::vector<Mismatch> mismatches;
    std::vector<std::string> warnings;

    std::map<std::string, double> accuracy_by_parameter() const;
};

/// Newline-delimited `{"sample_id": ..., "values": {...}}` records; numbers
/// or strings are accepted as values. Throws RecordParseError.
std::vector<PredictionRecord> read_predictions(std::string_view text);

/// Scores every truth sample. A sample without a prediction record scores
/// zero with a warning; a repeated sample id keeps the last record.
EvalReport score_predictions(const std::vector<PredictionRecord>& preds, const std::vector<SampleManifest>& truth,
                             const ParameterSchema& schema, const ScoreConfig& cfg = {});

Json to_json(const EvalReport& r);
/// Fixed-width table of per-parameter, per-category and overall accuracy.
std::string format_report(const EvalReport& r);

/// Grid a uniform guesser draws from: the sampling grid for sampled
/// parameters and the integer range spanned by the formula for composites.
struct GuessDomain {
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::int64_t step = 1;
    std::int64_t size() const { return (max - min) / step + 1; }
};
std::map<std::string, GuessDomain> guess_domains(const DesignSpace& space);

}  // namespace piergen
