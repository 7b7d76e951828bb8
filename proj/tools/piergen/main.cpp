#include <CLI11.hpp>

#include <iostream>
#include <set>
#include <sstream>

#include "piergen/curriculum.hpp"
#include "piergen/errors.hpp"
#include "piergen/pipeline.hpp"
#include "piergen/rewards.hpp"
#include "piergen/stats.hpp"

namespace fs = std::filesystem;
using namespace piergen;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct RunFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> count;
    std::optional<std::string> out;
    std::optional<std::string> tasks;
    std::optional<std::string> formats;
    std::optional<std::string> guidance;
    std::optional<unsigned> jobs;

    void add_to(CLI::App* app) {
        app->add_option("--config", config, "JSON run configuration");
        app->add_option("--seed", seed, "Run seed");
        app->add_option("--count", count, "Number of samples");
        app->add_option("--out", out, "Output directory");
        app->add_option("--tasks", tasks, "Comma-separated task kinds (1,2,3 or names)");
        app->add_option("--formats", formats, "Comma-separated prompt formats");
        app->add_option("--guidance", guidance, "on, off or both");
        app->add_option("--jobs", jobs, "Worker threads");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config.empty()) {
            try {
                cfg.apply_json(Json::parse(read_file(config)));
            } catch (const Json::exception& e) {
                throw Error(config + ": " + e.what());
            }
        }
        if (seed) cfg.seed = *seed;
        if (count) cfg.count = *count;
        if (out) cfg.out = *out;
        if (jobs) cfg.jobs = *jobs;
        if (tasks) {
            cfg.curriculum.tasks.clear();
            for (const auto& t : split_list(*tasks)) cfg.curriculum.tasks.push_back(parse_task_kind(t));
        }
        if (formats) {
            cfg.curriculum.formats.clear();
            for (const auto& f : split_list(*formats)) cfg.curriculum.formats.push_back(parse_prompt_format(f));
        }
        if (guidance) {
            if (*guidance == "on") {
                cfg.curriculum.guidance = {true};
            } else if (*guidance == "off") {
                cfg.curriculum.guidance = {false};
            } else if (*guidance == "both") {
                cfg.curriculum.guidance = {false, true};
            } else {
                throw CLI::ValidationError("--guidance", "expected on, off or both");
            }
        }
        cfg.validate();
        return cfg;
    }
};

int cmd_generate(const RunFlags& flags) {
    const RunConfig cfg = flags.resolve();
    const GenerateResult r = generate_dataset(cfg);
    std::cout << "generated " << r.samples.size() << " samples in " << cfg.out.string() << " (train "
              << r.split.train.size() << ", test " << r.split.test.size() << ", warm-up " << r.split.warmup.size()
              << ")\n";
    return 0;
}

int cmd_curriculum(const RunFlags& flags) {
    const RunConfig cfg = flags.resolve();
    const CurriculumResult r = emit_curriculum(cfg);
    for (const auto& p : r.corpora) std::cout << (cfg.out / p).string() << "\n";
    for (const auto& p : r.eval) std::cout << (cfg.out / p).string() << "\n";
    return 0;
}

int cmd_score(const std::string& predictions, const std::string& manifest, const std::string& split,
              std::string report, double tolerance) {
    const DesignSpace space = default_schema();
    std::vector<SampleManifest> truth = read_manifest(read_file(manifest));
    if (!split.empty()) {
        const SplitAssignment s = split_from_json(Json::parse(read_file(split)));
        std::set<std::string> test;
        for (auto i : s.test) test.insert(sample_id_for(i));
        std::vector<SampleManifest> kept;
        for (auto& m : truth) {
            if (test.count(m.sample_id)) kept.push_back(std::move(m));
        }
        truth = std::move(kept);
    }
    const auto preds = read_predictions(read_file(predictions));
    const EvalReport r = score_predictions(preds, truth, space.schema, ScoreConfig{tolerance});
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << format_report(r);
    if (report.empty()) report = predictions + ".report.json";
    write_file(report, dump_pretty(to_json(r)));
    std::cout << "report: " << report << "\n";
    return 0;
}

std::vector<InstructionInstance> read_corpus(const std::string& path) {
    const std::string text = read_file(path);
    std::vector<InstructionInstance> out;
    std::size_t line_no = 0, start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) nl = text.size();
        const std::string line = text.substr(start, nl - start);
        start = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(instance_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw RecordParseError(line_no, e.what());
        }
    }
    return out;
}

int cmd_stats(const std::string& corpus, const RunFlags& flags) {
    const RunConfig cfg = flags.resolve();
    const auto instances = read_corpus(corpus);
    std::cout << corpus_stats(instances, cfg.task1, cfg.task2, default_schema().schema.size()).dump(2) << "\n";
    return 0;
}

int cmd_reward(const std::string& corpus, std::size_t line, const std::string& answer, const std::string& difficulty,
               const RunFlags& flags) {
    const RunConfig cfg = flags.resolve();
    const auto instances = read_corpus(corpus);
    if (line == 0 || line > instances.size()) throw Error("corpus has no record " + std::to_string(line));
    const InstructionInstance& inst = instances[line - 1];
    double reward = 0.0;
    switch (inst.kind) {
        case TaskKind::Dichotomous: reward = r_p1(answer, inst); break;
        case TaskKind::MultipleChoice: {
            ChoiceOutcome o;
            for (std::size_t i = 0; i < inst.options.size(); ++i) (inst.options[i].correct ? o.correct : o.incorrect).insert(i);
            for (const auto& letter : split_list(answer)) {
                if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z') throw Error("options are letters such as A,C");
                o.selected.insert(static_cast<std::size_t>(letter[0] - 'A'));
            }
            o.validate();
            reward = r_p2(o);
            break;
        }
        case TaskKind::CoTParameterization: {
            if (difficulty.empty()) throw CLI::ValidationError("--difficulty", "required for chain-of-thought rewards");
            const Json acc = Json::parse(read_file(difficulty));
            std::map<std::string, double> rates;
            const Json& per = acc.contains("per_parameter") ? acc.at("per_parameter") : acc;
            for (const auto& [name, v] : per.items()) rates[name] = v.is_object() ? v.at("accuracy").get<double>() : v.get<double>();
            PredictionMap pred;
            for (const auto& [name, v] : Json::parse(answer).items()) pred[name] = v.is_string() ? v.get<std::string>() : v.dump();
            reward = r_p3(pred, std::get<VectorTruth>(inst.truth).values, classify_difficulty(rates, cfg.difficulty),
                          cfg.difficulty);
            break;
        }
        default: throw WrongTaskKind("no reward is defined for " + std::string(to_string(inst.kind)));
    }
    std::cout << reward << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric pier drawing dataset generator and evaluation harness", "piergen"};
    app.require_subcommand(1);

    RunFlags gen_flags, cur_flags, stats_flags, reward_flags;
    auto* gen = app.add_subcommand("generate", "Sample designs and write every modality plus the manifest");
    gen_flags.add_to(gen);
    auto* cur = app.add_subcommand("curriculum", "Write instruction corpora for a generated dataset");
    cur_flags.add_to(cur);

    std::string predictions, manifest, split, report;
    double tolerance = 0.0;
    auto* score = app.add_subcommand("score", "Score parameter predictions against a manifest");
    score->add_option("predictions", predictions, "Prediction records (JSON lines)")->required();
    score->add_option("manifest", manifest, "Dataset manifest")->required();
    score->add_option("--split", split, "Split file; restricts scoring to its test samples");
    score->add_option("--report", report, "Report path (default: <predictions>.report.json)");
    score->add_option("--tolerance", tolerance, "Relative tolerance (default exact)")->check(CLI::NonNegativeNumber);

    std::string corpus;
    auto* stats = app.add_subcommand("stats", "Check corpus label balance and corruption distributions");
    stats->add_option("corpus", corpus, "Corpus file (JSON lines)")->required();
    stats_flags.add_to(stats);

    std::string reward_corpus, answer, difficulty;
    std::size_t line = 1;
    auto* reward = app.add_subcommand("reward", "Reward a single answer to one corpus record");
    reward->add_option("corpus", reward_corpus, "Corpus file (JSON lines)")->required();
    reward->add_option("--line", line, "1-based record number");
    reward->add_option("--answer", answer, "yes/no, option letters such as A,C, or a JSON object")->required();
    reward->add_option("--difficulty", difficulty, "Per-parameter accuracies or a score report");
    reward_flags.add_to(reward);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) return cmd_generate(gen_flags);
        if (*cur) return cmd_curriculum(cur_flags);
        if (*score) return cmd_score(predictions, manifest, split, report, tolerance);
        if (*stats) return cmd_stats(corpus, stats_flags);
        if (*reward) return cmd_reward(reward_corpus, line, answer, difficulty, reward_flags);
    } catch (const CLI::Error& e) {
        std::cerr << "piergen: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "piergen: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "piergen: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "piergen: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
