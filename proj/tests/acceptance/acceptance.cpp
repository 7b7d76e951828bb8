// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "piergen/curriculum.hpp"
#include "piergen/dxf.hpp"
#include "piergen/pipeline.hpp"
#include "piergen/rewards.hpp"
#include "piergen/solids.hpp"
#include "piergen/stats.hpp"

namespace fs = std::filesystem;
using namespace piergen;

namespace {

constexpr std::uint64_t kSeed = 20240601;
constexpr std::uint64_t kSoundnessSamples = 10'000;
constexpr double kSoundnessSeconds = 60.0;
constexpr std::uint64_t kRoundTripSamples = 1'000;
constexpr std::uint64_t kDistributionInstances = 10'000;
constexpr double kAlpha = 0.01;
constexpr double kBinomialCoverage = 0.99;
constexpr std::uint64_t kRandomPredictorSamples = 1'000;
constexpr double kSigmaBand = 3.0;
constexpr std::uint64_t kStepSamples = 1'000;
constexpr std::uint64_t kDeterminismSamples = 40;
constexpr unsigned kThreadsA = 1;
constexpr unsigned kThreadsB = 4;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::string> tree_digests(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = sha256_hex(slurp(e.path()));
    }
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("piergen_acceptance_" + name);
    fs::remove_all(p);
    return p;
}

std::vector<ParameterVector> batch(std::uint64_t seed, std::uint64_t n) {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.space = &fixture::space();
    return sample_batch(cfg, n);
}

Outcome constraint_soundness() {
    const auto& space = fixture::space();
    const auto t0 = std::chrono::steady_clock::now();
    const auto vs = batch(kSeed, kSoundnessSamples);
    std::uint64_t bad = 0;
    for (const auto& v : vs) {
        if (v.size() != 15 || !check_constraints(v, space.constraints).empty() || !is_self_consistent(v, space.formulas)) {
            ++bad;
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[160];
    std::snprintf(buf, sizeof buf, "%llu samples, %llu invalid, %.2f s (limit %.0f s)",
                  static_cast<unsigned long long>(vs.size()), static_cast<unsigned long long>(bad), secs,
                  kSoundnessSeconds);
    return {vs.size() == kSoundnessSamples && bad == 0 && secs < kSoundnessSeconds, buf};
}

Outcome round_trip_fidelity() {
    const auto& schema = fixture::space().schema;
    std::uint64_t mismatched = 0, exceptions = 0;
    for (const auto& v : batch(kSeed + 1, kRoundTripSamples)) {
        try {
            const Drawing d = build_views(v);
            Drawing parsed;
            for (ViewId id : kAllViews) parsed.view(id) = parse_dxf(write_dxf(d, id));
            std::map<std::string, std::int64_t> got = extract_annotations(parsed);
            got["num_pier_columns"] = static_cast<std::int64_t>(count_layer(parsed, Layer::PierColumn, ViewId::Front));
            got["num_piles"] = static_cast<std::int64_t>(count_layer(parsed, Layer::Piles, ViewId::Top));
            got["num_bearings"] = static_cast<std::int64_t>(count_layer(parsed, Layer::Bearings, ViewId::Front));
            std::map<std::string, std::int64_t> want;
            for (const auto& def : schema.defs()) {
                if (def.kind != ParameterKind::Composite) want[def.name] = v.at(def.name);
            }
            mismatched += got != want;
        } catch (const std::exception&) {
            ++exceptions;
        }
    }
    return {mismatched == 0 && exceptions == 0,
            std::to_string(kRoundTripSamples) + " samples, " + std::to_string(mismatched) + " mismatched, " +
                std::to_string(exceptions) + " exceptions"};
}

Outcome reward_oracle() {
    std::uint64_t cases = 0, wrong = 0;
    for (std::size_t n = 2; n <= 5; ++n) {
        const unsigned all = (1u << n) - 1;
        for (unsigned correct = 1; correct < all; ++correct) {
            const int k = __builtin_popcount(correct);
            if (k != 1 && k != 2) continue;
            for (unsigned sel = 0; sel <= all; ++sel) {
                ChoiceOutcome o;
                for (std::size_t i = 0; i < n; ++i) {
                    ((correct >> i) & 1u ? o.correct : o.incorrect).insert(i);
                    if ((sel >> i) & 1u) o.selected.insert(i);
                }
                double expected = 0.0;
                if (sel != 0 && (sel & ~correct) == 0) expected = sel == correct ? 1.0 : 0.2;
                ++cases;
                wrong += r_p2(o) != expected;
            }
        }
    }
    return {wrong == 0, std::to_string(cases) + " (options, correct set, selection) cases, " + std::to_string(wrong) +
                            " disagreements"};
}

Outcome spot_values() {
    const auto label = [](const std::string& l, std::size_t corrupted) {
        InstructionInstance inst;
        inst.kind = TaskKind::Dichotomous;
        inst.truth = LabelTruth{l};
        for (std::size_t i = 0; i < corrupted; ++i) inst.corruption.push_back({"e" + std::to_string(i), 1, 2});
        return inst;
    };
    const bool p1 = r_p1("yes", label("yes", 0)) == 1.0 && r_p1("yes", label("no", 1)) == 0.0 &&
                    r_p1("no", label("no", 7)) == 1.0 && r_p1("no", label("yes", 0)) == 0.0;

    const auto v = fixture::worked_example();
    const auto names = fixture::space().schema.names();
    DifficultyMap dm;
    for (std::size_t i = 0; i < names.size(); ++i) {
        dm.tiers[names[i]] = i < 6 ? Difficulty::Easy : i < 12 ? Difficulty::Medium : Difficulty::Hard;
    }
    PredictionMap all;
    for (const auto& [k, x] : v.values()) all[k] = std::to_string(x);
    DifficultyConfig cfg;
    const double full = r_p3(all, v, dm, cfg);
    const double none = r_p3({}, v, dm, cfg);
    const double one_hard = r_p3({{names.back(), std::to_string(v.at(names.back()))}}, v, dm, cfg);
    const bool p3 = full == 6 * 1.0 + 6 * 1.5 + 3 * 2.0 && full == 21.0 && none == 0.0 && one_hard == 2.0;
    char buf[160];
    std::snprintf(buf, sizeof buf, "r_p1 cases %s; r_p3 all=%g none=%g one hard=%g", p1 ? "ok" : "wrong", full, none,
                  one_hard);
    return {p1 && p3, buf};
}

Outcome engine_distributions() {
    const auto& schema = fixture::space().schema;
    const Task1Config t1;
    const Task2Config t2;
    const auto vs = batch(kSeed + 2, kDistributionInstances);
    std::uint64_t yes = 0;
    std::vector<std::uint64_t> n_hist(15, 0), p_hist(10, 0);
    std::map<std::int64_t, std::vector<std::uint64_t>> q_by_p;
    for (std::uint64_t i = 0; i < vs.size(); ++i) {
        const auto m = fixture::manifest_of(vs[i], i);
        auto r1 = instance_rng(kSeed, m.sample_id, TaskKind::Dichotomous);
        const auto a = gen_task1(m, schema, t1, r1);
        if (std::get<LabelTruth>(a.truth).label == "yes") {
            ++yes;
        } else {
            ++n_hist[static_cast<std::size_t>(a.meta.at("n") - 1)];
        }
        auto r2 = instance_rng(kSeed, m.sample_id, TaskKind::MultipleChoice);
        const auto b = gen_task2(m, schema, t2, r2);
        const auto p = b.meta.at("p"), q = b.meta.at("q");
        ++p_hist[static_cast<std::size_t>(p - 1)];
        auto& h = q_by_p[p];
        h.resize(static_cast<std::size_t>(15 - p), 0);
        ++h[static_cast<std::size_t>(q - 1)];
    }
    const auto [lo, hi] = binomial_interval(kDistributionInstances, t1.correct_fraction, kBinomialCoverage);
    const bool balance = yes >= lo && yes <= hi;

    const auto n_fit = chi_square_gof(n_hist, std::vector<double>(15, 1.0 / 15.0));
    const auto p_fit = chi_square_gof(p_hist, rounded_normal_pmf(t2.p_mean, t2.p_sigma, t2.p_min, t2.p_max));

    // Law of q: clamped rounded normals mixed over the observed p counts.
    std::vector<std::uint64_t> q_hist(14, 0);
    std::vector<double> q_law(14, 0.0);
    for (const auto& [p, h] : q_by_p) {
        std::uint64_t count = 0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            q_hist[k] += h[k];
            count += h[k];
        }
        const auto pmf = rounded_normal_pmf(t2.q_mean, t2.q_sigma, t2.q_min, 15 - p);
        for (std::size_t k = 0; k < pmf.size(); ++k) q_law[k] += pmf[k] * static_cast<double>(count);
    }
    const auto q_fit = chi_square_gof(q_hist, q_law);

    char buf[320];
    std::snprintf(buf, sizeof buf,
                  "yes=%llu in [%llu, %llu]; n chi2 p=%.4f; p chi2 p=%.4f; q chi2 p=%.4f (alpha %.2f)",
                  static_cast<unsigned long long>(yes), static_cast<unsigned long long>(lo),
                  static_cast<unsigned long long>(hi), n_fit.p_value, p_fit.p_value, q_fit.p_value, kAlpha);
    return {balance && n_fit.p_value > kAlpha && p_fit.p_value > kAlpha && q_fit.p_value > kAlpha, buf};
}

Outcome metric_correctness() {
    const auto& space = fixture::space();
    const auto vs = batch(kSeed + 3, kRandomPredictorSamples);
    std::vector<SampleManifest> truth;
    std::vector<PredictionRecord> perfect, random;
    const auto domains = guess_domains(space);
    CounterRng rng(kSeed, hash_string("random predictor"));
    for (std::uint64_t i = 0; i < vs.size(); ++i) {
        truth.push_back(fixture::manifest_of(vs[i], i));
        PredictionRecord p{truth.back().sample_id, {}, i + 1}, r{truth.back().sample_id, {}, i + 1};
        for (const auto& [name, value] : vs[i].values()) {
            p.values[name] = std::to_string(value);
            const auto& d = domains.at(name);
            r.values[name] = std::to_string(d.min + d.step * rng.uniform_int(0, d.size() - 1));
        }
        perfect.push_back(std::move(p));
        random.push_back(std::move(r));
    }
    const bool perfect_ok = score_predictions(perfect, truth, space.schema).overall == Ratio{15 * vs.size(), 15 * vs.size()};

    // Each uniform guess is right with probability 1/size.
    double mean = 0.0, var = 0.0;
    for (const auto& [name, d] : domains) {
        const double q = 1.0 / static_cast<double>(d.size());
        mean += q;
        var += q * (1.0 - q);
    }
    const double n = static_cast<double>(vs.size());
    const double chance = mean / 15.0;
    const double sigma = std::sqrt(n * var) / (15.0 * n);
    const double observed = score_predictions(random, truth, space.schema).overall.value();
    const bool random_ok = std::fabs(observed - chance) <= kSigmaBand * sigma;

    const auto a = fixture::manifest_of(vs[0], 0), b = fixture::manifest_of(vs[1], 1);
    PredictionRecord pa = perfect[0], pb = perfect[1];
    const auto names = space.schema.names();
    for (std::size_t i = 0; i < 3; ++i) {
        pa.values[names[i]] = "0";
        pb.values.erase(names[14 - i]);
    }
    const auto hand = score_predictions({pa, pb}, {a, b}, space.schema).overall;
    const bool hand_ok = hand == Ratio{24, 30} && hand.value() == 0.8;

    char buf[240];
    std::snprintf(buf, sizeof buf, "perfect %s; random %.5f vs chance %.5f +/- %.1f*%.5f; hand case %llu/%llu",
                  perfect_ok ? "1.0" : "wrong", observed, chance, kSigmaBand, sigma,
                  static_cast<unsigned long long>(hand.correct), static_cast<unsigned long long>(hand.total));
    return {perfect_ok && random_ok && hand_ok, buf};
}

Outcome step_brep_validity() {
    std::uint64_t invalid_step = 0, bad_shells = 0, shells = 0, bad_height = 0;
    for (const auto& v : batch(kSeed + 4, kStepSamples)) {
        const auto a = interpret(script_from_vector(v));
        if (!oracle::check_part21(write_step(a)).ok()) ++invalid_step;
        for (const auto& s : build_brep(a).shells) {
            ++shells;
            if (s.euler_characteristic() != 2 || !s.watertight()) ++bad_shells;
            if (s.kind == Solid::Kind::Box && (s.vertices.size() != 8 || s.edges.size() != 12 || s.faces.size() != 6)) {
                ++bad_shells;
            }
        }
        const std::string dump = write_brep_dump(a);
        if (dump.find("watertight no") != std::string::npos) ++bad_shells;
        const auto stacked = v.at("pile_cap_height") + v.at("pier_column_height") + v.at("cap_beam_height");
        if (a.bounds().size().z != v.at("total_structure_height") || a.bounds().size().z != stacked) ++bad_height;
    }
    return {invalid_step == 0 && bad_shells == 0 && bad_height == 0,
            std::to_string(kStepSamples) + " STEP files, " + std::to_string(invalid_step) + " invalid; " +
                std::to_string(shells) + " shells, " + std::to_string(bad_shells) + " failing; " +
                std::to_string(bad_height) + " height mismatches"};
}

RunConfig small_run(const fs::path& out, unsigned jobs) {
    RunConfig cfg;
    cfg.seed = kSeed;
    cfg.count = kDeterminismSamples;
    cfg.out = out;
    cfg.jobs = jobs;
    return cfg;
}

Outcome determinism() {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    generate_dataset(small_run(a, kThreadsA));
    generate_dataset(small_run(b, kThreadsB));
    const auto da = tree_digests(a), db = tree_digests(b);
    fs::remove_all(a);
    fs::remove_all(b);
    return {!da.empty() && da == db, std::to_string(da.size()) + " files with " + std::to_string(kThreadsA) +
                                         " thread vs " + std::to_string(db.size()) + " with " +
                                         std::to_string(kThreadsB) + ", trees " + (da == db ? "identical" : "differ")};
}

Outcome taxonomy_and_split() {
    const auto& s = fixture::space().schema;
    const bool taxonomy = s.size() == 15 && s.count(ParameterKind::Recognition) == 6 &&
                          s.count(ParameterKind::Counting) == 3 && s.count(ParameterKind::Composite) == 6;
    const auto sp = split_dataset(100, 0.8, 0.2, 0.05, kSeed);
    std::set<std::uint64_t> train(sp.train.begin(), sp.train.end()), all = train;
    for (auto t : sp.test) all.insert(t);
    bool warm_in_train = !sp.warmup.empty();
    for (auto w : sp.warmup) warm_in_train = warm_in_train && train.count(w);
    const bool split = sp.train.size() == 80 && sp.test.size() == 20 && all.size() == 100 && warm_in_train;
    return {taxonomy && split, std::string("6/3/6 ") + (taxonomy ? "ok" : "wrong") + "; split " +
                                   std::to_string(sp.train.size()) + "/" + std::to_string(sp.test.size()) +
                                   ", warm-up " + std::to_string(sp.warmup.size()) + (warm_in_train ? " in train" : " leaks")};
}

Outcome no_leak() {
    const fs::path out = scratch("leak");
    RunConfig cfg = small_run(out, kThreadsB);
    cfg.curriculum.tasks.assign(std::begin(kAllTaskKinds), std::end(kAllTaskKinds));
    cfg.curriculum.formats.assign(std::begin(kAllPromptFormats), std::end(kAllPromptFormats));
    cfg.curriculum.guidance = {false, true};
    const GenerateResult g = generate_dataset(cfg);
    const CurriculumResult c = emit_curriculum(cfg);
    std::set<std::string> test_ids, train_ids;
    for (auto i : g.split.test) test_ids.insert(sample_id_for(i));
    for (auto i : g.split.train) train_ids.insert(sample_id_for(i));

    std::uint64_t files = 0, records = 0, leaks = 0, foreign_exemplars = 0;
    std::vector<fs::path> training = c.corpora;
    training.insert(training.end(), c.warmup.begin(), c.warmup.end());
    for (const auto& rel : training) {
        ++files;
        std::istringstream in(slurp(out / rel));
        for (std::string line; std::getline(in, line);) {
            if (line.empty()) continue;
            ++records;
            for (const auto& id : test_ids) leaks += line.find(id) != std::string::npos;
            const Json j = Json::parse(line);
            const auto ex = j.find("exemplar_id");
            if (ex != j.end() && ex->is_string() && !train_ids.count(ex->get<std::string>())) ++foreign_exemplars;
        }
    }
    fs::remove_all(out);
    const bool complete = files == c.corpora.size() + c.warmup.size() && records > 0;
    return {complete && leaks == 0 && foreign_exemplars == 0,
            std::to_string(files) + " training files, " + std::to_string(records) + " records scanned for " +
                std::to_string(test_ids.size()) + " test ids: " + std::to_string(leaks) + " leaks, " +
                std::to_string(foreign_exemplars) + " non-train exemplars"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"constraint soundness", constraint_soundness},
        {"round-trip fidelity", round_trip_fidelity},
        {"r_p2 brute-force equivalence", reward_oracle},
        {"r_p1 / r_p3 spot values", spot_values},
        {"data-engine distributions", engine_distributions},
        {"metric correctness", metric_correctness},
        {"STEP / B-Rep validity", step_brep_validity},
        {"determinism across thread counts", determinism},
        {"taxonomy and split", taxonomy_and_split},
        {"no test-split leakage", no_leak},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
