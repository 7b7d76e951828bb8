#include "piergen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "piergen/sampler.hpp"

namespace piergen {

namespace fs = std::filesystem;

namespace {

template <typename T>
void read_key(const Json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw Error("unknown config key '" + where + k + "'");
    }
}

}  // namespace

void RunConfig::apply_json(const Json& j) {
    try {
        reject_unknown(j,
                       {"seed", "count", "out", "jobs", "max_rejections_per_sample", "split", "raster", "task1",
                        "task2", "difficulty", "curriculum", "design_space"},
                       "");
        read_key(j, "seed", seed);
        read_key(j, "count", count);
        if (j.contains("out")) out = j.at("out").get<std::string>();
        read_key(j, "jobs", jobs);
        read_key(j, "max_rejections_per_sample", max_rejections_per_sample);
        if (j.contains("design_space")) design_space_file = j.at("design_space").get<std::string>();
        if (j.contains("split")) {
            const Json& s = j.at("split");
            reject_unknown(s, {"train", "test", "warmup_fraction"}, "split.");
            read_key(s, "train", train_ratio);
            read_key(s, "test", test_ratio);
            read_key(s, "warmup_fraction", warmup_fraction);
        }
        if (j.contains("raster")) {
            const Json& r = j.at("raster");
            reject_unknown(r, {"width_px", "height_px", "stroke_width_px", "margin_fraction"}, "raster.");
            read_key(r, "width_px", raster.width_px);
            read_key(r, "height_px", raster.height_px);
            read_key(r, "stroke_width_px", raster.stroke_width_px);
            read_key(r, "margin_fraction", raster.margin_fraction);
        }
        if (j.contains("task1")) {
            const Json& t = j.at("task1");
            reject_unknown(t, {"correct_fraction", "n_min", "n_max"}, "task1.");
            read_key(t, "correct_fraction", task1.correct_fraction);
            read_key(t, "n_min", task1.n_min);
            read_key(t, "n_max", task1.n_max);
        }
        if (j.contains("task2")) {
            const Json& t = j.at("task2");
            reject_unknown(t,
                           {"p_mean", "p_sigma", "p_min", "p_max", "q_mean", "q_sigma", "q_min", "num_options",
                            "min_correct", "max_correct"},
                           "task2.");
            read_key(t, "p_mean", task2.p_mean);
            read_key(t, "p_sigma", task2.p_sigma);
            read_key(t, "p_min", task2.p_min);
            read_key(t, "p_max", task2.p_max);
            read_key(t, "q_mean", task2.q_mean);
            read_key(t, "q_sigma", task2.q_sigma);
            read_key(t, "q_min", task2.q_min);
            read_key(t, "num_options", task2.num_options);
            read_key(t, "min_correct", task2.min_correct);
            read_key(t, "max_correct", task2.max_correct);
        }
        if (j.contains("difficulty")) {
            const Json& d = j.at("difficulty");
            reject_unknown(d,
                           {"easy_threshold", "hard_threshold", "easy_reward", "medium_reward", "hard_reward",
                            "wrong_reward"},
                           "difficulty.");
            read_key(d, "easy_threshold", difficulty.easy_threshold);
            read_key(d, "hard_threshold", difficulty.hard_threshold);
            read_key(d, "easy_reward", difficulty.easy_reward);
            read_key(d, "medium_reward", difficulty.medium_reward);
            read_key(d, "hard_reward", difficulty.hard_reward);
            read_key(d, "wrong_reward", difficulty.wrong_reward);
        }
        if (j.contains("curriculum")) {
            const Json& c = j.at("curriculum");
            reject_unknown(c, {"tasks", "formats", "guidance", "emit_eval"}, "curriculum.");
            if (c.contains("tasks")) {
                curriculum.tasks.clear();
                for (const auto& t : c.at("tasks")) {
                    curriculum.tasks.push_back(parse_task_kind(t.is_string() ? t.get<std::string>() : t.dump()));
                }
            }
            if (c.contains("formats")) {
                curriculum.formats.clear();
                for (const auto& f : c.at("formats")) curriculum.formats.push_back(parse_prompt_format(f.get<std::string>()));
            }
            if (c.contains("guidance")) {
                curriculum.guidance.clear();
                const Json& g = c.at("guidance");
                if (g.is_boolean()) {
                    curriculum.guidance.push_back(g.get<bool>());
                } else {
                    for (const auto& x : g) curriculum.guidance.push_back(x.get<bool>());
                }
            }
            read_key(c, "emit_eval", curriculum.emit_eval);
        }
    } catch (const Json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
}

void RunConfig::validate() const {
    if (jobs == 0) throw Error("jobs must be at least 1");
    if (max_rejections_per_sample == 0) throw Error("max_rejections_per_sample must be at least 1");
    raster.validate();
    task1.validate();
    difficulty.validate();
    if (curriculum.tasks.empty() || curriculum.formats.empty() || curriculum.guidance.empty()) {
        throw Error("curriculum tasks, formats and guidance must be nonempty");
    }
    if (train_ratio < 0 || test_ratio < 0 || std::abs(train_ratio + test_ratio - 1.0) > 1e-9) {
        throw Error("split ratios must be non-negative and sum to 1");
    }
}

Json RunConfig::to_json() const {
    Json j;
    j["seed"] = seed;
    j["count"] = count;
    j["max_rejections_per_sample"] = max_rejections_per_sample;
    j["split"] = {{"train", train_ratio}, {"test", test_ratio}, {"warmup_fraction", warmup_fraction}};
    j["raster"] = {{"width_px", raster.width_px},
                   {"height_px", raster.height_px},
                   {"stroke_width_px", raster.stroke_width_px},
                   {"margin_fraction", raster.margin_fraction}};
    j["task1"] = {{"correct_fraction", task1.correct_fraction}, {"n_min", task1.n_min}, {"n_max", task1.n_max}};
    j["task2"] = {{"p_mean", task2.p_mean},         {"p_sigma", task2.p_sigma},       {"p_min", task2.p_min},
                  {"p_max", task2.p_max},           {"q_mean", task2.q_mean},         {"q_sigma", task2.q_sigma},
                  {"q_min", task2.q_min},           {"num_options", task2.num_options},
                  {"min_correct", task2.min_correct}, {"max_correct", task2.max_correct}};
    j["difficulty"] = {{"easy_threshold", difficulty.easy_threshold}, {"hard_threshold", difficulty.hard_threshold},
                       {"easy_reward", difficulty.easy_reward},       {"medium_reward", difficulty.medium_reward},
                       {"hard_reward", difficulty.hard_reward},       {"wrong_reward", difficulty.wrong_reward}};
    Json tasks = Json::array(), formats = Json::array(), guidance = Json::array();
    for (auto t : curriculum.tasks) tasks.push_back(to_string(t));
    for (auto f : curriculum.formats) formats.push_back(to_string(f));
    for (bool g : curriculum.guidance) guidance.push_back(g);
    j["curriculum"] = {{"tasks", tasks}, {"formats", formats}, {"guidance", guidance}, {"emit_eval", curriculum.emit_eval}};
    if (design_space_file) j["design_space"] = design_space_file->string();
    return j;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
    std::error_code ec;
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + p.string());
}

DesignSpace load_design_space(const RunConfig& cfg) {
    if (!cfg.design_space_file) return default_schema();
    try {
        return design_space_from_json(Json::parse(read_file(*cfg.design_space_file)));
    } catch (const Json::exception& e) {
        throw Error(cfg.design_space_file->string() + ": " + e.what());
    }
}

namespace {

/// Runs fn(i) for i in [0, n) on `jobs` threads; rethrows the failure with the lowest index.
template <typename Fn>
void parallel_for(std::uint64_t n, unsigned jobs, Fn fn) {
    std::atomic<std::uint64_t> next{0};
    std::mutex mu;
    std::uint64_t failed_at = UINT64_MAX;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, jobs), std::max<std::uint64_t>(n, 1)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

Json split_to_json(const SplitAssignment& s) {
    auto ids = [](const std::vector<std::uint64_t>& v) {
        Json a = Json::array();
        for (auto i : v) a.push_back(sample_id_for(i));
        return a;
    };
    return {{"train", ids(s.train)}, {"test", ids(s.test)}, {"warmup", ids(s.warmup)}};
}

SplitAssignment split_from_json(const Json& j) {
    auto parse = [](const Json& a) {
        std::vector<std::uint64_t> out;
        for (const auto& id : a) {
            const auto s = id.get<std::string>();
            const auto pos = s.rfind('_');
            if (pos == std::string::npos) throw Error("bad sample id '" + s + "' in split");
            out.push_back(std::stoull(s.substr(pos + 1)));
        }
        return out;
    };
    return {parse(j.at("train")), parse(j.at("test")), parse(j.at("warmup"))};
}

GenerateResult generate_dataset(const RunConfig& cfg) {
    cfg.validate();
    const DesignSpace space = load_design_space(cfg);
    SamplerConfig sc{cfg.seed, cfg.max_rejections_per_sample, &space};

    GenerateResult result;
    result.samples.resize(cfg.count);
    parallel_for(cfg.count, cfg.jobs, [&](std::uint64_t i) {
        const ParameterVector v = sample(sc, i);
        RenderedSample r = render_sample(v, space, cfg.seed, i, cfg.raster);
        for (const auto& [path, bytes] : r.files) write_file(cfg.out / path, bytes);
        result.samples[i] = std::move(r.manifest);
    });

    result.split = split_dataset(cfg.count, cfg.train_ratio, cfg.test_ratio, cfg.warmup_fraction, cfg.seed);
    write_file(cfg.out / "manifest.jsonl", write_manifest(result.samples, space.schema));
    write_file(cfg.out / "split.json", dump_pretty(split_to_json(result.split)));
    write_file(cfg.out / "design_space.json", dump_pretty(to_json(space)));
    write_file(cfg.out / "run_config.json", dump_pretty(cfg.to_json()));
    return result;
}

std::string corpus_file_name(TaskKind task, const PromptConfig& p) {
    return std::string(to_string(task)) + "_" + std::string(to_string(p.format)) + "_" +
           (p.reasoning_guidance ? "guided" : "plain") + ".jsonl";
}

namespace {

const SampleManifest& pick_other(const std::vector<const SampleManifest*>& pool, const std::set<std::string>& exclude,
                                 CounterRng& rng) {
    std::vector<const SampleManifest*> eligible;
    for (const auto* m : pool) {
        if (!exclude.count(m->sample_id)) eligible.push_back(m);
    }
    if (eligible.empty()) throw Error("not enough training samples to choose an exemplar or partner");
    return *eligible[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1))];
}

}  // namespace

CurriculumResult emit_curriculum(const RunConfig& cfg) {
    cfg.validate();
    const fs::path manifest_path = cfg.out / "manifest.jsonl";
    const fs::path split_path = cfg.out / "split.json";
    if (!fs::exists(manifest_path) || !fs::exists(split_path)) {
        throw IoError("missing dataset: run generate for " + cfg.out.string() + " first");
    }
    const DesignSpace space = load_design_space(cfg);
    const std::vector<SampleManifest> samples = read_manifest(read_file(manifest_path));
    SplitAssignment split;
    try {
        split = split_from_json(Json::parse(read_file(split_path)));
    } catch (const Json::exception& e) {
        throw Error(split_path.string() + ": " + e.what());
    }
    std::map<std::uint64_t, const SampleManifest*> by_index;
    for (const auto& m : samples) by_index[m.index] = &m;
    auto lookup = [&](std::uint64_t i) -> const SampleManifest& {
        auto it = by_index.find(i);
        if (it == by_index.end()) throw Error("split references " + sample_id_for(i) + " missing from the manifest");
        return *it->second;
    };
    std::vector<const SampleManifest*> train, test;
    for (auto i : split.train) train.push_back(&lookup(i));
    for (auto i : split.test) test.push_back(&lookup(i));
    const std::set<std::uint64_t> warm(split.warmup.begin(), split.warmup.end());

    auto exemplar_for = [&](const InstructionInstance& inst) -> const SampleManifest& {
        CounterRng rng(cfg.seed, hash_string(inst.sample_id), hash_string("exemplar"));
        return pick_other(train, {inst.sample_id, inst.partner_sample_id}, rng);
    };

    auto make_instance = [&](const SampleManifest& s, TaskKind kind) {
        CounterRng rng = instance_rng(cfg.seed, s.sample_id, kind);
        switch (kind) {
            case TaskKind::Dichotomous: return gen_task1(s, space.schema, cfg.task1, rng);
            case TaskKind::MultipleChoice: return gen_task2(s, space.schema, cfg.task2, rng);
            case TaskKind::CoTParameterization: return gen_task3_cot(s, space);
            case TaskKind::ViewMatching: {
                if (rng.bernoulli(0.5)) return gen_view_matching(s, s, rng);
                // Draw partners until one differs; identical designs would make the label "same".
                for (int attempt = 0; attempt < 64; ++attempt) {
                    const SampleManifest& b = pick_other(train, {s.sample_id}, rng);
                    if (!(b.truth == s.truth)) return gen_view_matching(s, b, rng);
                }
                return gen_view_matching(s, s, rng);
            }
            default: return gen_posttune(s, kind, space, cfg.task1, rng);
        }
    };

    CurriculumResult result;
    for (TaskKind task : cfg.curriculum.tasks) {
        std::vector<InstructionInstance> instances;
        for (const auto* s : train) instances.push_back(make_instance(*s, task));
        for (PromptFormat format : cfg.curriculum.formats) {
            for (bool guided : cfg.curriculum.guidance) {
                const PromptConfig pc{format, guided};
                std::string all, warmup;
                for (std::size_t i = 0; i < instances.size(); ++i) {
                    const auto& inst = instances[i];
                    const SampleManifest* ex = needs_exemplar(format) ? &exemplar_for(inst) : nullptr;
                    const std::string line =
                        dump_line(corpus_record(inst, pc, build_prompt(inst, pc, space.schema, ex), space.schema)) + "\n";
                    all += line;
                    if (warm.count(train[i]->index)) warmup += line;
                }
                const fs::path name = corpus_file_name(task, pc);
                write_file(cfg.out / "corpora" / name, all);
                write_file(cfg.out / "corpora" / "warmup" / name, warmup);
                result.corpora.push_back(fs::path("corpora") / name);
                result.warmup.push_back(fs::path("corpora") / "warmup" / name);
            }
        }
    }

    if (cfg.curriculum.emit_eval) {
        Task1Config unused;
        for (PromptFormat format : cfg.curriculum.formats) {
            for (bool guided : cfg.curriculum.guidance) {
                const PromptConfig pc{format, guided};
                std::string all;
                for (const auto* s : test) {
                    CounterRng rng = instance_rng(cfg.seed, s->sample_id, TaskKind::FullParamList);
                    InstructionInstance inst = gen_posttune(*s, TaskKind::FullParamList, space, unused, rng);
                    const SampleManifest* ex = needs_exemplar(format) ? &exemplar_for(inst) : nullptr;
                    all += dump_line(corpus_record(inst, pc, build_prompt(inst, pc, space.schema, ex), space.schema)) + "\n";
                }
                const fs::path name = std::string(to_string(format)) + "_" + (guided ? "guided" : "plain") + ".jsonl";
                write_file(cfg.out / "eval" / name, all);
                result.eval.push_back(fs::path("eval") / name);
            }
        }
    }
    return result;
}

}  // namespace piergen
