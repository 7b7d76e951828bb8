#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "piergen/curriculum.hpp"
#include "piergen/errors.hpp"
#include "piergen/stats.hpp"

using namespace piergen;

namespace {

std::size_t hamming(const ParameterVector& a, const ParameterVector& b) {
    std::size_t n = 0;
    for (const auto& [k, v] : a.values()) n += b.at(k) != v;
    return n;
}

/// Checks the magnitude rules for one perturbed entry.
void check_edit(const Edit& e) {
    const auto& def = fixture::space().schema.at(e.name);
    CHECK(e.to != e.from);
    CHECK(e.to > 0);
    if (def.unit == Unit::Count) {
        CHECK(std::llabs(e.to - e.from) == 1);
        REQUIRE(def.sample_range);
        CHECK(e.to >= def.sample_range->min);
        CHECK(e.to <= def.sample_range->max);
    } else {
        if (10 * def.grid_step <= 3 * std::llabs(e.from)) CHECK((e.to - e.from) % def.grid_step == 0);
        if (std::llabs(e.from) >= 4) CHECK(10 * std::llabs(e.to - e.from) <= 3 * std::llabs(e.from));
    }
}

std::vector<SampleManifest> manifests(std::uint64_t seed, std::uint64_t n) {
    std::vector<SampleManifest> out;
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(fixture::manifest_of(fixture::sampled(seed, i), i));
    return out;
}

}  // namespace

TEST_CASE("corrupt touches exactly n entries and replays exactly") {
    const auto& schema = fixture::space().schema;
    const auto v = fixture::sampled(42, 0);
    for (std::size_t n = 1; n <= 15; ++n) {
        CounterRng rng(99, n);
        const Corrupted c = corrupt(v, n, schema, rng);
        CHECK(hamming(v, c.vector) == n);
        CHECK(c.edits.size() == n);
        std::set<std::string> names;
        for (const auto& e : c.edits) {
            check_edit(e);
            CHECK(names.insert(e.name).second);
            CHECK(v.at(e.name) == e.from);
        }
        CHECK(replay(v, c.edits) == c.vector);
    }
    CounterRng rng(1);
    CHECK_THROWS_AS(replay(fixture::sampled(42, 1), corrupt(v, 3, schema, rng).edits), Error);
}

TEST_CASE("corrupt falls back to movable entries and reports infeasibility") {
    ParameterSchema schema("t", {{"a", ParameterKind::Counting, Unit::Count, IntRange{2, 2}, 1},
                                 {"b", ParameterKind::Counting, Unit::Count, IntRange{1, 3}, 1}});
    ParameterVector v("t", {{"a", 2}, {"b", 2}});
    CounterRng rng(5);
    for (int i = 0; i < 20; ++i) {
        const auto c = corrupt(v, 1, schema, rng);
        REQUIRE(c.edits.size() == 1);
        CHECK(c.edits[0].name == "b");
    }
    CHECK_THROWS_AS(corrupt(v, 2, schema, rng), InfeasibleCorruption);
}

TEST_CASE("task 1 labels are sound") {
    const auto& schema = fixture::space().schema;
    const auto ms = manifests(3, 300);
    std::size_t yes = 0;
    for (const auto& m : ms) {
        auto rng = instance_rng(3, m.sample_id, TaskKind::Dichotomous);
        const auto inst = gen_task1(m, schema, Task1Config{}, rng);
        const auto& label = std::get<LabelTruth>(inst.truth).label;
        CHECK((label == "yes") == inst.corruption.empty());
        CHECK((label == "yes") == (inst.listed == m.truth));
        CHECK(replay(m.truth, inst.corruption) == inst.listed);
        CHECK(inst.images.size() == 1);
        if (label == "no") {
            CHECK(hamming(m.truth, inst.listed) == static_cast<std::size_t>(inst.meta.at("n")));
            CHECK(inst.meta.at("n") >= 1);
            CHECK(inst.meta.at("n") <= 15);
        }
        yes += label == "yes";
    }
    CHECK(yes > 100);
    CHECK(yes < 200);
    CHECK_THROWS_AS((Task1Config{0.5, 0, 15}.validate()), Error);
    CHECK_THROWS_AS((Task1Config{1.5, 1, 15}.validate()), Error);
    CHECK_THROWS_AS((Task1Config{0.5, 4, 3}.validate()), Error);
}

TEST_CASE("task 1 with one corrupted value is labelled no") {
    const auto m = fixture::manifest_of(fixture::worked_example(), 0);
    CounterRng rng(1);
    const auto inst = gen_task1(m, fixture::space().schema, Task1Config{0.0, 1, 1}, rng);
    CHECK(std::get<LabelTruth>(inst.truth).label == "no");
    CHECK(hamming(m.truth, inst.listed) == 1);
}

TEST_CASE("task 2 options are sound") {
    const auto& schema = fixture::space().schema;
    for (const auto& m : manifests(4, 300)) {
        auto rng = instance_rng(4, m.sample_id, TaskKind::MultipleChoice);
        const auto inst = gen_task2(m, schema, Task2Config{}, rng);
        const auto p = inst.meta.at("p"), q = inst.meta.at("q");
        CHECK(p >= 1);
        CHECK(p <= 10);
        CHECK(q >= 1);
        CHECK(q <= 15 - p);
        CHECK(inst.masked.size() == static_cast<std::size_t>(p));
        REQUIRE(inst.options.size() == 4);
        const auto& correct = std::get<OptionTruth>(inst.truth).correct;
        CHECK(correct.size() >= 1);
        CHECK(correct.size() <= 2);
        std::size_t flagged = 0, wrong = 0;
        for (std::size_t i = 0; i < inst.options.size(); ++i) {
            const auto& o = inst.options[i];
            const bool listed = std::find(correct.begin(), correct.end(), i) != correct.end();
            CHECK(o.correct == listed);
            CHECK((o.values == m.truth) == o.correct);
            CHECK(replay(m.truth, o.edits) == o.values);
            flagged += o.correct;
            if (o.correct) continue;
            ++wrong;
            std::size_t masked_wrong = 0, unmasked_wrong = 0;
            for (const auto& e : o.edits) {
                check_edit(e);
                const bool is_masked = std::find(inst.masked.begin(), inst.masked.end(), e.name) != inst.masked.end();
                masked_wrong += is_masked;
                unmasked_wrong += !is_masked;
            }
            CHECK(masked_wrong == static_cast<std::size_t>(p));
            CHECK(unmasked_wrong == static_cast<std::size_t>(q));
        }
        CHECK(flagged >= 1);
        CHECK(wrong >= 1);
        CHECK(inst.prompt.find("?") != std::string::npos);
    }
}

TEST_CASE("task 2 config validation") {
    Task2Config bad;
    bad.num_options = 2;
    bad.max_correct = 2;
    CHECK_THROWS_AS(bad.validate(15), Error);
    Task2Config ok;
    CHECK_NOTHROW(ok.validate(15));
}

TEST_CASE("task 3 chain of thought covers each composite once") {
    const auto& space = fixture::space();
    const auto v = fixture::worked_example();
    const auto inst = gen_task3_cot(fixture::manifest_of(v, 0), space);
    REQUIRE(inst.cot.size() == 6);
    std::set<std::string> seen;
    for (const auto& step : inst.cot) {
        CHECK(seen.insert(step.parameter).second);
        CHECK(space.schema.at(step.parameter).kind == ParameterKind::Composite);
        CHECK(step.result == v.at(step.parameter));
        // Step 3 equals the formula evaluated over exactly the step-1 factors.
        const auto out = space.formulas.formula(step.parameter).evaluate([&](const std::string& n) {
            for (const auto& [name, value] : step.factors) {
                if (name == n) return std::optional<std::int64_t>(value);
            }
            return std::optional<std::int64_t>();
        });
        CHECK(out.status == Expr::Outcome::Status::Ok);
        CHECK(out.value == step.result);
    }
    const auto& first = inst.cot.front();
    CHECK(first.parameter == "cross_bridge_pier_spacing");
    using F = std::vector<std::pair<std::string, std::int64_t>>;
    CHECK(first.factors == F{{"pier_column_cross_dim", 1200}, {"pile_spacing", 4000}});
    CHECK(first.formula == "cross_bridge_pier_spacing = pier_column_cross_dim + pile_spacing");
    CHECK(first.result == 5200);
    CHECK(std::get<VectorTruth>(inst.truth).values == v);
}

TEST_CASE("post-tuning tasks") {
    const auto& space = fixture::space();
    const auto m = fixture::manifest_of(fixture::sampled(6, 0), 0);
    CounterRng rng(6);
    const auto full = gen_posttune(m, TaskKind::FullParamList, space, Task1Config{}, rng);
    CHECK(std::get<VectorTruth>(full.truth).values == m.truth);

    std::size_t corrupted = 0;
    for (int i = 0; i < 200; ++i) {
        const auto val = gen_posttune(m, TaskKind::ParamValidation, space, Task1Config{}, rng);
        const auto& verdict = std::get<VerdictTruth>(val.truth).entry_ok;
        CHECK(verdict.size() == 15);
        for (const auto& [name, ok] : verdict) CHECK(ok == (val.listed.at(name) == m.truth.at(name)));
        corrupted += !val.corruption.empty();
    }
    CHECK(corrupted > 60);
    CHECK(corrupted < 140);

    std::set<std::string> components;
    for (int i = 0; i < 60; ++i) {
        const auto c = gen_posttune(m, TaskKind::ComponentCounting, space, Task1Config{}, rng);
        const auto& t = std::get<CountTruth>(c.truth);
        CHECK(t.value == m.truth.at(t.parameter));
        CHECK(c.prompt.find(t.component) != std::string::npos);
        components.insert(t.component);
    }
    CHECK(components == std::set<std::string>{"bearings", "pier columns", "piles"});
    CHECK_THROWS_AS(gen_posttune(m, TaskKind::Dichotomous, space, Task1Config{}, rng), WrongTaskKind);
}

TEST_CASE("view matching labels") {
    const auto a = fixture::manifest_of(fixture::sampled(7, 0), 0);
    const auto b = fixture::manifest_of(fixture::sampled(7, 1), 1);
    REQUIRE(a.truth != b.truth);
    for (int i = 0; i < 30; ++i) {
        CounterRng rng(8, static_cast<std::uint64_t>(i));
        const auto same = gen_view_matching(a, a, rng);
        CHECK(std::get<LabelTruth>(same.truth).label == "same");
        REQUIRE(same.images.size() == 2);
        CHECK(same.images[0].path != same.images[1].path);
        const auto diff = gen_view_matching(a, b, rng);
        CHECK(std::get<LabelTruth>(diff.truth).label == "different");
    }
    auto twin = fixture::manifest_of(a.truth, 5);
    CounterRng rng(1);
    CHECK(std::get<LabelTruth>(gen_view_matching(a, twin, rng).truth).label == "same");
}

TEST_CASE("build_prompt formats") {
    const auto& schema = fixture::space().schema;
    const auto test = fixture::manifest_of(fixture::sampled(9, 0), 0);
    const auto ex = fixture::manifest_of(fixture::sampled(9, 1), 1);
    CounterRng rng(2);
    const auto inst = gen_task1(test, schema, Task1Config{}, rng);

    const auto plain = build_prompt(inst, {PromptFormat::TestImageOnly, false}, schema);
    CHECK(plain.images.size() == 1);
    CHECK(plain.exemplar_id.empty());
    CHECK(plain.text.find("Follow these steps") == std::string::npos);

    const auto pair = build_prompt(inst, {PromptFormat::PlusAnsweredPair, true}, schema, &ex);
    CHECK(pair.images.size() == 2);
    CHECK(pair.exemplar_id == ex.sample_id);
    CHECK(pair.text.find("- pile_spacing: " + std::to_string(ex.truth.at("pile_spacing"))) != std::string::npos);
    for (const auto& step : guidance_steps(PromptFormat::PlusAnsweredPair)) {
        CHECK(pair.text.find(step) != std::string::npos);
    }

    const auto guided = build_prompt(inst, {PromptFormat::TestImageOnly, true}, schema);
    CHECK(guided.text.find("Identify all annotated numbers") != std::string::npos);

    const auto attr = build_prompt(inst, {PromptFormat::PlusAttributeExplanation, false}, schema);
    CHECK(attr.images.size() == 1);
    for (const auto& n : schema.names()) CHECK(attr.text.find("- " + n + " (") != std::string::npos);

    CHECK_THROWS_AS(build_prompt(inst, {PromptFormat::PlusReferenceImage, false}, schema), MissingExemplar);
    CHECK_THROWS_AS(build_prompt(inst, {PromptFormat::PlusAnsweredPair, false}, schema, &test), ExemplarLeak);
    for (PromptFormat f : kAllPromptFormats) {
        CHECK(guidance_steps(f).size() == 3);
        CHECK(parse_prompt_format(to_string(f)) == f);
    }
}

TEST_CASE("split_dataset examples") {
    const auto s = split_dataset(100, 0.8, 0.2, 0.05, 42);
    CHECK(s.train.size() == 80);
    CHECK(s.test.size() == 20);
    CHECK(s.warmup.size() == 4);
    std::set<std::uint64_t> all(s.train.begin(), s.train.end());
    for (auto t : s.test) CHECK(all.insert(t).second);
    CHECK(all.size() == 100);
    CHECK(std::includes(s.train.begin(), s.train.end(), s.warmup.begin(), s.warmup.end()));
    const auto again = split_dataset(100, 0.8, 0.2, 0.05, 42);
    CHECK(again.train == s.train);
    CHECK(again.warmup == s.warmup);
    CHECK(split_dataset(100, 0.8, 0.2, 0.05, 43).train != s.train);
    CHECK(split_dataset(0, 0.8, 0.2, 0.05, 1).train.empty());
    CHECK_THROWS_AS(split_dataset(10, 0.7, 0.2, 0.05, 1), Error);
}

TEST_CASE("instances survive JSON serialization") {
    const auto& space = fixture::space();
    const auto m = fixture::manifest_of(fixture::sampled(10, 0), 0);
    for (TaskKind k : {TaskKind::Dichotomous, TaskKind::MultipleChoice}) {
        auto rng = instance_rng(10, m.sample_id, k);
        const auto inst = k == TaskKind::Dichotomous ? gen_task1(m, space.schema, Task1Config{}, rng)
                                                     : gen_task2(m, space.schema, Task2Config{}, rng);
        const auto back = instance_from_json(Json::parse(dump_line(to_json(inst, space.schema))));
        CHECK(back.instance_id == inst.instance_id);
        CHECK(back.kind == inst.kind);
        CHECK(back.prompt == inst.prompt);
        CHECK(back.corruption == inst.corruption);
        CHECK(back.meta == inst.meta);
        CHECK(back.options.size() == inst.options.size());
        CHECK(to_json(back, space.schema) == to_json(inst, space.schema));
    }
    for (TaskKind k : kAllTaskKinds) CHECK(parse_task_kind(to_string(k)) == k);
    CHECK(parse_task_kind("2") == TaskKind::MultipleChoice);
}

TEST_CASE("rounded normal pmf matches a direct integration") {
    const auto pmf = rounded_normal_pmf(5, 2, 1, 10);
    REQUIRE(pmf.size() == 10);
    double total = 0;
    for (double x : pmf) total += x;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // Interior mass of k is P(k - 0.5 <= X < k + 0.5).
    const auto cdf = [](double x) { return 0.5 * std::erfc(-(x - 5.0) / (2.0 * std::sqrt(2.0))); };
    CHECK(pmf[4] == doctest::Approx(cdf(5.5) - cdf(4.5)).epsilon(1e-9));
    CHECK(pmf[0] == doctest::Approx(cdf(1.5)).epsilon(1e-9));
    CHECK(pmf[9] == doctest::Approx(1.0 - cdf(9.5)).epsilon(1e-9));
}

TEST_CASE("chi-square goodness of fit") {
    const auto fair = chi_square_gof({100, 100, 100, 100}, {0.25, 0.25, 0.25, 0.25});
    CHECK(fair.statistic == doctest::Approx(0.0));
    CHECK(fair.dof == 3);
    CHECK(fair.p_value == doctest::Approx(1.0));
    const auto skew = chi_square_gof({190, 70, 70, 70}, {0.25, 0.25, 0.25, 0.25});
    CHECK(skew.statistic == doctest::Approx(108.0));
    CHECK(skew.p_value < 1e-6);
    const auto pooled = chi_square_gof({50, 1, 1, 48}, {0.49, 0.01, 0.01, 0.49});
    CHECK(pooled.bins < 4);
    const auto iv = binomial_interval(10000, 0.5, 0.99);
    CHECK(iv.first < 5000);
    CHECK(iv.second > 5000);
    CHECK(iv.second - 5000 == 5000 - iv.first);
    CHECK(iv.first > 4850);
}
