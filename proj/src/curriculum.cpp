#include "piergen/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "piergen/errors.hpp"

namespace piergen {

std::string_view to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::Dichotomous: return "dichotomous";
        case TaskKind::MultipleChoice: return "multiple_choice";
        case TaskKind::CoTParameterization: return "cot_parameterization";
        case TaskKind::FullParamList: return "full_param_list";
        case TaskKind::ParamValidation: return "param_validation";
        case TaskKind::ViewMatching: return "view_matching";
        case TaskKind::ComponentCounting: return "component_counting";
    }
    return "?";
}

TaskKind parse_task_kind(std::string_view text) {
    if (text == "1") return TaskKind::Dichotomous;
    if (text == "2") return TaskKind::MultipleChoice;
    if (text == "3") return TaskKind::CoTParameterization;
    for (TaskKind k : kAllTaskKinds) {
        if (to_string(k) == text) return k;
    }
    throw Error("unknown task kind '" + std::string(text) + "'");
}

ParameterVector replay(const ParameterVector& v, const Corruption& edits) {
    ParameterVector out = v;
    for (const auto& e : edits) {
        if (out.at(e.name) != e.from) {
            throw Error("replay mismatch on '" + e.name + "': expected " + std::to_string(e.from) + ", found " +
                        std::to_string(out.at(e.name)));
        }
        out.set(e.name, e.to);
    }
    return out;
}

std::optional<std::int64_t> perturb_value(const ParameterDef& def, std::int64_t value, CounterRng& rng) {
    if (def.unit == Unit::Count) {
        const std::int64_t lo = def.sample_range ? std::max<std::int64_t>(def.sample_range->min, 1) : 1;
        const std::int64_t hi = def.sample_range ? def.sample_range->max : INT64_MAX;
        const bool up = value < hi;
        const bool down = value > lo;
        if (up && down) return rng.bernoulli(0.5) ? value + 1 : value - 1;
        if (up) return value + 1;
        if (down) return value - 1;
        return std::nullopt;
    }
    std::int64_t step = std::max<std::int64_t>(def.grid_step, 1);
    while (step > 1 && 10 * step > 3 * std::abs(value)) step = std::max<std::int64_t>(1, step / 10);
    const std::int64_t kmax = std::max<std::int64_t>(1, (3 * std::abs(value)) / (10 * step));
    const std::int64_t k = rng.uniform_int(1, kmax);
    const bool negative = rng.bernoulli(0.5);
    if (negative && value - k * step > 0) return value - k * step;
    return value + k * step;
}

Corrupted corrupt(const ParameterVector& v, std::size_t n, const ParameterSchema& schema, CounterRng& rng,
                  const std::vector<std::string>& candidates) {
    std::vector<std::string> pool;
    for (const auto& name : candidates.empty() ? schema.names() : candidates) {
        if (v.contains(name)) pool.push_back(name);
    }
    if (n > pool.size()) throw InfeasibleCorruption();
    for (std::size_t i = pool.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(pool[i - 1], pool[j]);
    }
    Corrupted out{v, {}};
    for (const auto& name : pool) {
        if (out.edits.size() == n) break;
        const std::int64_t from = v.at(name);
        auto to = perturb_value(schema.at(name), from, rng);
        if (!to) continue;
        out.vector.set(name, *to);
        out.edits.push_back({name, from, *to});
    }
    if (out.edits.size() != n) throw InfeasibleCorruption();
    return out;
}

void Task1Config::validate() const {
    if (!(correct_fraction >= 0.0 && correct_fraction <= 1.0)) throw Error("correct_fraction must lie in [0, 1]");
    if (n_min < 1 || n_min > n_max || n_max > 15) throw Error("n range must satisfy 1 <= n_min <= n_max <= 15");
}

void Task2Config::validate(std::size_t parameter_count) const {
    const auto count = static_cast<std::int64_t>(parameter_count);
    if (p_sigma <= 0 || q_sigma <= 0) throw Error("p and q sigmas must be positive");
    if (p_min < 1 || p_min > p_max || p_max >= count) throw Error("p clamp must satisfy 1 <= p_min <= p_max < count");
    if (q_min < 1 || q_min > count - p_max) throw Error("q_min must leave room for every p");
    if (num_options < 2) throw Error("num_options must be at least 2");
    if (min_correct < 1 || min_correct > max_correct || max_correct >= num_options) {
        throw Error("correct option counts must satisfy 1 <= min <= max < num_options");
    }
}

CounterRng instance_rng(std::uint64_t seed, std::string_view sample_id, TaskKind kind) {
    return CounterRng(seed, hash_string(sample_id), hash_string(to_string(kind)));
}

namespace {

std::string listing(const ParameterVector& v, const ParameterSchema& schema,
                    const std::vector<std::string>& masked = {}) {
    std::string out;
    for (const auto& d : schema.defs()) {
        if (!v.contains(d.name)) continue;
        out += "- " + d.name + ": ";
        if (std::find(masked.begin(), masked.end(), d.name) != masked.end()) {
            out += "?";
        } else {
            out += std::to_string(v.at(d.name));
        }
        out += '\n';
    }
    return out;
}

ImageRef sheet_image(const SampleManifest& s) {
    return {s.sample_id, s.sheet_png().path, "front, side and top views"};
}

InstructionInstance base_instance(const SampleManifest& s, TaskKind kind) {
    InstructionInstance inst;
    inst.instance_id = s.sample_id + "/" + std::string(to_string(kind));
    inst.sample_id = s.sample_id;
    inst.kind = kind;
    return inst;
}

std::string option_letter(std::size_t i) { return std::string(1, static_cast<char>('A' + i)); }

/// Picks k distinct names uniformly, returned in schema order.
std::vector<std::string> choose_names(const std::vector<std::string>& names, std::size_t k, CounterRng& rng) {
    std::vector<std::size_t> idx(names.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < k; ++i) {
        auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(idx.size()) - 1));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    for (auto i : idx) out.push_back(names[i]);
    return out;
}

Expr substitute(const Expr& e, const ParameterVector& v) {
    switch (e.op()) {
        case Expr::Op::Constant: return e;
        case Expr::Op::Variable: return Expr::constant(v.at(e.name()));
        case Expr::Op::Neg: return Expr::negate(substitute(e.operands()[0], v));
        default: return Expr::binary(e.op(), substitute(e.operands()[0], v), substitute(e.operands()[1], v));
    }
}

}  // namespace

InstructionInstance gen_task1(const SampleManifest& s, const ParameterSchema& schema, const Task1Config& cfg,
                              CounterRng& rng) {
    cfg.validate();
    InstructionInstance inst = base_instance(s, TaskKind::Dichotomous);
    inst.images = {sheet_image(s)};
    if (rng.bernoulli(cfg.correct_fraction)) {
        inst.listed = s.truth;
        inst.truth = LabelTruth{"yes"};
    } else {
        const auto n = rng.uniform_int(cfg.n_min, cfg.n_max);
        Corrupted c = corrupt(s.truth, static_cast<std::size_t>(n), schema, rng);
        inst.listed = std::move(c.vector);
        inst.corruption = std::move(c.edits);
        inst.meta["n"] = n;
        inst.truth = LabelTruth{"no"};
    }
    inst.prompt = "The drawing shows a prefabricated bridge pier. Below is a list of its parameters.\n" +
                  listing(inst.listed, schema) +
                  "Answer \"yes\" if every listed value matches the drawing, otherwise answer \"no\".";
    return inst;
}

InstructionInstance gen_task2(const SampleManifest& s, const ParameterSchema& schema, const Task2Config& cfg,
                              CounterRng& rng) {
    const std::vector<std::string> names = schema.names();
    cfg.validate(names.size());
    InstructionInstance inst = base_instance(s, TaskKind::MultipleChoice);
    inst.images = {sheet_image(s)};

    const std::int64_t p = rng.rounded_normal(cfg.p_mean, cfg.p_sigma, cfg.p_min, cfg.p_max);
    const std::int64_t q =
        rng.rounded_normal(cfg.q_mean, cfg.q_sigma, cfg.q_min, static_cast<std::int64_t>(names.size()) - p);
    inst.meta["p"] = p;
    inst.meta["q"] = q;
    inst.masked = choose_names(names, static_cast<std::size_t>(p), rng);

    std::vector<std::string> unmasked;
    for (const auto& n : names) {
        if (std::find(inst.masked.begin(), inst.masked.end(), n) == inst.masked.end()) unmasked.push_back(n);
    }

    const auto options = static_cast<std::size_t>(cfg.num_options);
    const auto num_correct = static_cast<std::size_t>(rng.uniform_int(cfg.min_correct, cfg.max_correct));
    std::vector<std::string> slots;
    for (std::size_t i = 0; i < options; ++i) slots.push_back(std::to_string(i));
    std::vector<std::size_t> correct_slots;
    for (const auto& slot : choose_names(slots, num_correct, rng)) correct_slots.push_back(std::stoul(slot));

    OptionTruth truth;
    for (std::size_t i = 0; i < options; ++i) {
        ChoiceOption opt;
        opt.correct = std::find(correct_slots.begin(), correct_slots.end(), i) != correct_slots.end();
        if (opt.correct) {
            opt.values = s.truth;
            truth.correct.push_back(i);
        } else {
            // Wrong fills for every masked entry, plus q wrong unmasked entries.
            Corrupted fills = corrupt(s.truth, inst.masked.size(), schema, rng, inst.masked);
            Corrupted errs = corrupt(fills.vector, static_cast<std::size_t>(q), schema, rng, unmasked);
            opt.values = std::move(errs.vector);
            opt.edits = std::move(fills.edits);
            opt.edits.insert(opt.edits.end(), errs.edits.begin(), errs.edits.end());
        }
        inst.options.push_back(std::move(opt));
    }
    inst.truth = std::move(truth);

    std::string prompt =
        "The drawing shows a prefabricated bridge pier. In the reference list below, entries marked ? are hidden.\n" +
        listing(s.truth, schema, inst.masked) + "Candidate complete lists:\n";
    for (std::size_t i = 0; i < inst.options.size(); ++i) {
        prompt += "Option " + option_letter(i) + ":\n" + listing(inst.options[i].values, schema);
    }
    prompt += "Select every option whose values all match the drawing. One or more options may be correct.";
    inst.prompt = std::move(prompt);
    return inst;
}

InstructionInstance gen_task3_cot(const SampleManifest& s, const DesignSpace& space) {
    InstructionInstance inst = base_instance(s, TaskKind::CoTParameterization);
    inst.images = {sheet_image(s)};
    for (const auto& d : space.schema.defs()) {
        if (d.kind != ParameterKind::Composite) continue;
        const Expr& f = space.formulas.formula(d.name);
        CotStep step;
        step.parameter = d.name;
        for (const auto& name : f.variables()) step.factors.emplace_back(name, s.truth.at(name));
        step.formula = d.name + " = " + f.to_string();
        step.substituted = substitute(f, s.truth).to_string();
        step.result = s.truth.at(d.name);
        inst.cot.push_back(std::move(step));
    }
    inst.truth = VectorTruth{s.truth};
    std::string names;
    for (const auto& n : space.schema.names()) names += "- " + n + "\n";
    inst.prompt =
        "The drawing shows a prefabricated bridge pier. Report the value of every parameter below. For each derived "
        "parameter, list the parameters it depends on, state its formula and then compute it.\n" +
        names;
    return inst;
}

namespace {

struct Component {
    const char* label;
    const char* parameter;
};
constexpr Component kComponents[] = {
    {"pier columns", "num_pier_columns"},
    {"piles", "num_piles"},
    {"bearings", "num_bearings"},
};

}  // namespace

InstructionInstance gen_posttune(const SampleManifest& s, TaskKind kind, const DesignSpace& space,
                                 const Task1Config& validation_cfg, CounterRng& rng) {
    const ParameterSchema& schema = space.schema;
    InstructionInstance inst = base_instance(s, kind);
    inst.images = {sheet_image(s)};
    switch (kind) {
        case TaskKind::FullParamList: {
            std::string names;
            for (const auto& n : schema.names()) names += "- " + n + "\n";
            inst.prompt = "The drawing shows a prefabricated bridge pier. Output the complete list of parameter values "
                          "as name: value pairs.\n" +
                          names;
            inst.truth = VectorTruth{s.truth};
            break;
        }
        case TaskKind::ParamValidation: {
            validation_cfg.validate();
            inst.listed = s.truth;
            if (rng.bernoulli(0.5)) {
                const auto n = rng.uniform_int(validation_cfg.n_min, validation_cfg.n_max);
                Corrupted c = corrupt(s.truth, static_cast<std::size_t>(n), schema, rng);
                inst.listed = std::move(c.vector);
                inst.corruption = std::move(c.edits);
                inst.meta["n"] = n;
            }
            VerdictTruth verdicts;
            for (const auto& n : schema.names()) verdicts.entry_ok[n] = inst.listed.at(n) == s.truth.at(n);
            inst.truth = std::move(verdicts);
            inst.prompt = "The drawing shows a prefabricated bridge pier. For each listed parameter, state whether "
                          "its value is correct or incorrect.\n" +
                          listing(inst.listed, schema);
            break;
        }
        case TaskKind::ComponentCounting: {
            const auto& c = kComponents[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(std::size(kComponents)) - 1))];
            inst.truth = CountTruth{c.label, c.parameter, s.truth.at(c.parameter)};
            inst.prompt = std::string("The drawing shows a prefabricated bridge pier. How many ") + c.label +
                          " does it have? Answer with a single integer.";
            break;
        }
        default:
            throw WrongTaskKind("gen_posttune does not generate " + std::string(to_string(kind)));
    }
    return inst;
}

InstructionInstance gen_view_matching(const SampleManifest& a, const SampleManifest& b, CounterRng& rng) {
    InstructionInstance inst = base_instance(a, TaskKind::ViewMatching);
    inst.partner_sample_id = b.sample_id;
    const auto va = static_cast<std::size_t>(rng.uniform_int(0, 2));
    std::size_t vb = static_cast<std::size_t>(rng.uniform_int(0, 2));
    if (a.sample_id == b.sample_id) vb = (va + 1 + static_cast<std::size_t>(rng.uniform_int(0, 1))) % 3;
    const ViewId ida = kAllViews[va];
    const ViewId idb = kAllViews[vb];
    inst.images = {{a.sample_id, a.png_for(ida).path, std::string(to_string(ida)) + " view"},
                   {b.sample_id, b.png_for(idb).path, std::string(to_string(idb)) + " view"}};
    inst.truth = LabelTruth{a.truth == b.truth ? "same" : "different"};
    inst.prompt = "Image 1 is the " + std::string(to_string(ida)) + " view and image 2 is the " +
                  std::string(to_string(idb)) +
                  " view of a prefabricated bridge pier. Do both views show the same pier? Answer \"same\" or "
                  "\"different\".";
    return inst;
}

std::string_view to_string(PromptFormat f) {
    switch (f) {
        case PromptFormat::TestImageOnly: return "test_image_only";
        case PromptFormat::PlusReferenceImage: return "reference_image";
        case PromptFormat::PlusAnsweredPair: return "answered_pair";
        case PromptFormat::PlusAttributeExplanation: return "attribute_explanation";
    }
    return "?";
}

PromptFormat parse_prompt_format(std::string_view text) {
    for (PromptFormat f : kAllPromptFormats) {
        if (to_string(f) == text) return f;
    }
    throw Error("unknown prompt format '" + std::string(text) + "'");
}

bool needs_exemplar(PromptFormat f) {
    return f == PromptFormat::PlusReferenceImage || f == PromptFormat::PlusAnsweredPair;
}

namespace {

const std::map<std::string, std::string, std::less<>>& attribute_notes() {
    static const std::map<std::string, std::string, std::less<>> notes = {
        {"cap_beam_cross_dim", "length of the cap beam across the bridge, read above the front view"},
        {"cap_beam_height", "vertical depth of the cap beam"},
        {"pier_column_cross_dim", "width of one pier column across the bridge"},
        {"pier_column_height", "clear height of a pier column between pile cap and cap beam"},
        {"pile_spacing", "centre distance between neighbouring piles in the top view"},
        {"pile_cap_height", "vertical depth of the pile cap"},
        {"num_pier_columns", "number of column rectangles in the front view"},
        {"num_piles", "number of pile circles in the top view"},
        {"num_bearings", "number of bearing blocks seated on the cap beam"},
        {"cross_bridge_pier_spacing", "centre distance between neighbouring columns"},
        {"total_structure_height", "pile cap, column and cap beam heights stacked"},
        {"column_envelope_width", "outer width spanned by all columns"},
        {"pile_row_extent", "centre distance between the outermost piles"},
        {"cap_beam_overhang", "cap beam length beyond the column envelope on one side"},
        {"bearing_pitch", "spacing of bearings along the cap beam"},
    };
    return notes;
}

}  // namespace

const std::vector<std::string>& guidance_steps(PromptFormat f) {
    static const std::vector<std::string> test_only = {
        "Identify all annotated numbers in the orthographic projection, including dimensions, spacing, and height.",
        "Interpret their meanings based on position, orientation, and surrounding context.",
        "Directly assign values to some parameters, count graphical elements for quantity parameters, and compute "
        "spacing parameters based on position.",
    };
    static const std::vector<std::string> reference = {
        "Use the reference template to understand the correspondence between primitive and parameters, and identify "
        "annotated numbers in the target image.",
        "Assign parameters based on position and template primitive, counting graphical primitive for quantities.",
        "Calculate parameters based on positional relationships or template definitions, and output the full set of "
        "parameter values.",
    };
    static const std::vector<std::string> answered = {
        "Learn the correspondence between structures and parameters from the example image.",
        "Identify and interpret annotated numbers in the target image, considering their position and similarity to "
        "the example.",
        "Assign values to parameters, count graphical primitive for quantities, calculate parameters, and apply "
        "necessary constraints to produce final results.",
    };
    static const std::vector<std::string> attributes = {
        "Clarify parameter definitions and their geometric meanings, including component types and their properties.",
        "Identify annotated numbers in the orthographic projection and infer their corresponding parameters.",
        "Assign values to parameters, compute quantities, derive spacing values from positional relationships, and "
        "output the complete parameter set with necessary constraints.",
    };
    switch (f) {
        case PromptFormat::TestImageOnly: return test_only;
        case PromptFormat::PlusReferenceImage: return reference;
        case PromptFormat::PlusAnsweredPair: return answered;
        case PromptFormat::PlusAttributeExplanation: return attributes;
    }
    return test_only;
}

PromptBundle build_prompt(const InstructionInstance& inst, const PromptConfig& cfg, const ParameterSchema& schema,
                          const SampleManifest* exemplar) {
    PromptBundle b;
    b.images = inst.images;
    std::string preamble;
    if (needs_exemplar(cfg.format)) {
        if (!exemplar) throw MissingExemplar();
        if (exemplar->sample_id == inst.sample_id || exemplar->sample_id == inst.partner_sample_id) {
            throw ExemplarLeak(exemplar->sample_id);
        }
        b.exemplar_id = exemplar->sample_id;
        const auto n = std::to_string(b.images.size() + 1);
        b.images.push_back({exemplar->sample_id, exemplar->sheet_png().path, "exemplar drawing"});
        if (cfg.format == PromptFormat::PlusReferenceImage) {
            preamble = "Image " + n + " is a reference drawing of another pier of the same type. Use it to relate "
                       "drawing elements to parameters.\n";
        } else {
            preamble = "Image " + n + " is a solved example with these parameter values:\n" +
                       listing(exemplar->truth, schema);
        }
    } else if (cfg.format == PromptFormat::PlusAttributeExplanation) {
        preamble = "Parameter definitions:\n";
        const auto& notes = attribute_notes();
        for (const auto& d : schema.defs()) {
            auto it = notes.find(d.name);
            std::string note = it != notes.end() ? it->second : std::string(to_string(d.kind)) + " parameter";
            preamble += "- " + d.name + " (" + std::string(to_string(d.unit)) + "): " + note + "\n";
        }
    }

    std::string text;
    for (std::size_t i = 0; i < b.images.size(); ++i) {
        text += "<image " + std::to_string(i + 1) + ": " + b.images[i].path + ">\n";
    }
    text += preamble;
    text += inst.prompt;
    if (cfg.reasoning_guidance) {
        text += "\nFollow these steps:\n";
        const auto& steps = guidance_steps(cfg.format);
        for (std::size_t i = 0; i < steps.size(); ++i) text += std::to_string(i + 1) + ". " + steps[i] + "\n";
    } else {
        text += '\n';
    }
    b.text = std::move(text);
    return b;
}

SplitAssignment split_dataset(std::uint64_t count, double train_ratio, double test_ratio, double warmup_fraction,
                              std::uint64_t seed) {
    if (train_ratio < 0 || test_ratio < 0 || std::abs(train_ratio + test_ratio - 1.0) > 1e-9) {
        throw Error("split ratios must be non-negative and sum to 1");
    }
    if (warmup_fraction < 0 || warmup_fraction > 1) throw Error("warmup fraction must lie in [0, 1]");
    std::vector<std::uint64_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    CounterRng rng(seed, hash_string("split"));
    for (std::uint64_t i = count; i > 1; --i) {
        auto j = static_cast<std::uint64_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    const auto n_train = static_cast<std::uint64_t>(std::llround(train_ratio * static_cast<double>(count)));
    SplitAssignment s;
    s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    const auto n_warm = static_cast<std::uint64_t>(std::llround(warmup_fraction * static_cast<double>(n_train)));
    s.warmup.assign(s.train.begin(), s.train.begin() + static_cast<std::ptrdiff_t>(n_warm));
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    std::sort(s.warmup.begin(), s.warmup.end());
    return s;
}

namespace {

Json edits_json(const Corruption& edits) {
    Json out = Json::array();
    for (const auto& e : edits) out.push_back({{"name", e.name}, {"from", e.from}, {"to", e.to}});
    return out;
}

Corruption edits_from_json(const Json& j) {
    Corruption out;
    for (const auto& e : j) {
        out.push_back({e.at("name").get<std::string>(), e.at("from").get<std::int64_t>(), e.at("to").get<std::int64_t>()});
    }
    return out;
}

Json truth_json(const GroundTruth& t, const ParameterSchema& schema) {
    return std::visit(
        [&schema](const auto& g) -> Json {
            using T = std::decay_t<decltype(g)>;
            Json j;
            if constexpr (std::is_same_v<T, LabelTruth>) {
                j["type"] = "label";
                j["label"] = g.label;
            } else if constexpr (std::is_same_v<T, OptionTruth>) {
                j["type"] = "options";
                j["correct"] = g.correct;
            } else if constexpr (std::is_same_v<T, VectorTruth>) {
                j["type"] = "vector";
                j["values"] = values_to_json(g.values, schema);
            } else if constexpr (std::is_same_v<T, VerdictTruth>) {
                j["type"] = "verdicts";
                Json entries = Json::object();
                for (const auto& n : schema.names()) {
                    if (auto it = g.entry_ok.find(n); it != g.entry_ok.end()) entries[n] = it->second;
                }
                j["entries"] = std::move(entries);
            } else {
                j["type"] = "count";
                j["component"] = g.component;
                j["parameter"] = g.parameter;
                j["value"] = g.value;
            }
            return j;
        },
        t);
}

GroundTruth truth_from_json(const Json& j, const std::string& version) {
    const auto type = j.at("type").get<std::string>();
    if (type == "label") return LabelTruth{j.at("label").get<std::string>()};
    if (type == "options") return OptionTruth{j.at("correct").get<std::vector<std::size_t>>()};
    if (type == "vector") return VectorTruth{values_from_json(j.at("values"), version)};
    if (type == "verdicts") {
        VerdictTruth v;
        for (const auto& [name, ok] : j.at("entries").items()) v.entry_ok[name] = ok.get<bool>();
        return v;
    }
    if (type == "count") {
        return CountTruth{j.at("component").get<std::string>(), j.at("parameter").get<std::string>(),
                          j.at("value").get<std::int64_t>()};
    }
    throw Error("unknown ground truth type '" + type + "'");
}

}  // namespace

Json to_json(const InstructionInstance& inst, const ParameterSchema& schema) {
    Json j;
    j["instance_id"] = inst.instance_id;
    j["sample_id"] = inst.sample_id;
    if (!inst.partner_sample_id.empty()) j["partner_sample_id"] = inst.partner_sample_id;
    j["task"] = to_string(inst.kind);
    j["schema_version"] = schema.version();
    Json images = Json::array();
    for (const auto& im : inst.images) {
        images.push_back({{"sample_id", im.sample_id}, {"path", im.path}, {"caption", im.caption}});
    }
    j["images"] = std::move(images);
    j["prompt"] = inst.prompt;
    if (inst.listed.size() > 0) j["listed"] = values_to_json(inst.listed, schema);
    if (!inst.masked.empty()) j["masked"] = inst.masked;
    if (!inst.options.empty()) {
        Json options = Json::array();
        for (const auto& o : inst.options) {
            options.push_back(
                {{"values", values_to_json(o.values, schema)}, {"correct", o.correct}, {"edits", edits_json(o.edits)}});
        }
        j["options"] = std::move(options);
    }
    if (!inst.cot.empty()) {
        Json cot = Json::array();
        for (const auto& s : inst.cot) {
            Json factors = Json::object();
            for (const auto& [n, v] : s.factors) factors[n] = v;
            cot.push_back({{"parameter", s.parameter},
                           {"factors", std::move(factors)},
                           {"formula", s.formula},
                           {"substituted", s.substituted},
                           {"result", s.result}});
        }
        j["cot"] = std::move(cot);
    }
    j["corruption"] = edits_json(inst.corruption);
    Json meta = Json::object();
    for (const auto& [k, v] : inst.meta) meta[k] = v;
    j["meta"] = std::move(meta);
    j["truth"] = truth_json(inst.truth, schema);
    return j;
}

Json corpus_record(const InstructionInstance& inst, const PromptConfig& cfg, const PromptBundle& bundle,
                   const ParameterSchema& schema) {
    Json j = to_json(inst, schema);
    j["format"] = to_string(cfg.format);
    j["guidance"] = cfg.reasoning_guidance;
    if (cfg.reasoning_guidance) j["guidance_version"] = kGuidanceTemplateVersion;
    j["exemplar_id"] = bundle.exemplar_id.empty() ? Json(nullptr) : Json(bundle.exemplar_id);
    Json images = Json::array();
    for (const auto& im : bundle.images) {
        images.push_back({{"sample_id", im.sample_id}, {"path", im.path}, {"caption", im.caption}});
    }
    j["prompt_images"] = std::move(images);
    j["prompt_text"] = bundle.text;
    return j;
}

InstructionInstance instance_from_json(const Json& j) {
    InstructionInstance inst;
    const auto version = j.at("schema_version").get<std::string>();
    inst.instance_id = j.at("instance_id").get<std::string>();
    inst.sample_id = j.at("sample_id").get<std::string>();
    inst.partner_sample_id = j.value("partner_sample_id", std::string());
    inst.kind = parse_task_kind(j.at("task").get<std::string>());
    for (const auto& im : j.at("images")) {
        inst.images.push_back(
            {im.at("sample_id").get<std::string>(), im.at("path").get<std::string>(), im.value("caption", "")});
    }
    inst.prompt = j.at("prompt").get<std::string>();
    if (j.contains("listed")) inst.listed = values_from_json(j.at("listed"), version);
    if (j.contains("masked")) inst.masked = j.at("masked").get<std::vector<std::string>>();
    if (j.contains("options")) {
        for (const auto& o : j.at("options")) {
            inst.options.push_back({values_from_json(o.at("values"), version), o.at("correct").get<bool>(),
                                    edits_from_json(o.at("edits"))});
        }
    }
    if (j.contains("cot")) {
        for (const auto& s : j.at("cot")) {
            CotStep step;
            step.parameter = s.at("parameter").get<std::string>();
            for (const auto& [n, v] : s.at("factors").items()) step.factors.emplace_back(n, v.get<std::int64_t>());
            step.formula = s.at("formula").get<std::string>();
            step.substituted = s.at("substituted").get<std::string>();
            step.result = s.at("result").get<std::int64_t>();
            inst.cot.push_back(std::move(step));
        }
    }
    if (j.contains("corruption")) inst.corruption = edits_from_json(j.at("corruption"));
    if (j.contains("meta")) {
        for (const auto& [k, v] : j.at("meta").items()) inst.meta[k] = v.get<std::int64_t>();
    }
    inst.truth = truth_from_json(j.at("truth"), version);
    return inst;
}

}  // namespace piergen
