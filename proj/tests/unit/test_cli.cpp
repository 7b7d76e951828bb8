#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "piergen/io.hpp"
#include "piergen/pipeline.hpp"

namespace fs = std::filesystem;
using namespace piergen;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

/// Runs the CLI with stderr folded into the captured output.
Run piergen_cli(const std::string& args) {
    const std::string cmd = std::string(PIERGEN_EXE) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) r.out += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("piergen_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& rel) const { return (path / rel).string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::map<std::string, std::string> tree_digests(const fs::path& root) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = sha256_hex(slurp(e.path()));
    }
    return out;
}

}  // namespace

TEST_CASE("generate writes ten samples with six modalities each") {
    TempDir dir("gen10");
    const auto r = piergen_cli("generate --count 10 --seed 3 --out " + dir / "out");
    REQUIRE_MESSAGE(r.code == 0, r.out);
    const auto rows = lines_of(slurp(dir / "out/manifest.jsonl"));
    REQUIRE(rows.size() == 10);
    for (const auto& row : rows) {
        const Json j = Json::parse(row);
        const auto& f = j.at("files");
        CHECK(f.at("dxf").size() == 3);
        CHECK(f.at("png").size() == 4);
        for (const auto* ref : {&f.at("parameters"), &f.at("script"), &f.at("step"), &f.at("brep"),
                                &f.at("dxf").at("front"), &f.at("png").at("top")}) {
            const fs::path p = fs::path(dir / "out") / ref->at("path").get<std::string>();
            REQUIRE(fs::exists(p));
            CHECK(sha256_hex(slurp(p)) == ref->at("sha256").get<std::string>());
        }
    }
}

TEST_CASE("rerunning generate reproduces the tree byte for byte") {
    TempDir dir("rerun");
    REQUIRE(piergen_cli("generate --count 4 --seed 8 --out " + dir / "a").code == 0);
    const auto first = tree_digests(dir / "a");
    REQUIRE(piergen_cli("generate --count 4 --seed 8 --jobs 3 --out " + dir / "a").code == 0);
    CHECK(tree_digests(dir / "a") == first);
}

TEST_CASE("count zero gives an empty manifest") {
    TempDir dir("zero");
    const auto r = piergen_cli("generate --count 0 --out " + dir / "out");
    CHECK(r.code == 0);
    CHECK(slurp(dir / "out/manifest.jsonl").empty());
}

TEST_CASE("flags override the config file") {
    TempDir dir("precedence");
    spit(dir / "cfg.json", R"({"seed": 5, "count": 3, "split": {"warmup_fraction": 0.5}})");
    const auto r = piergen_cli("generate --config " + dir / "cfg.json" + " --count 2 --out " + dir / "out");
    REQUIRE_MESSAGE(r.code == 0, r.out);
    const Json run = Json::parse(slurp(dir / "out/run_config.json"));
    CHECK(run.at("seed") == 5);
    CHECK(run.at("count") == 2);
    CHECK(run.at("split").at("warmup_fraction") == 0.5);
    CHECK(lines_of(slurp(dir / "out/manifest.jsonl")).size() == 2);
}

TEST_CASE("exit codes") {
    TempDir dir("codes");
    CHECK(piergen_cli("").code == 1);
    CHECK(piergen_cli("generate --count notanumber").code == 1);
    CHECK(piergen_cli("curriculum --formats nonsense --out " + dir / "x").code == 2);
    spit(dir / "bad.json", R"({"no_such_key": 1})");
    CHECK(piergen_cli("generate --config " + dir / "bad.json" + " --out " + dir / "x").code == 2);
    CHECK(piergen_cli("curriculum --out " + dir / "missing").code == 3);
    CHECK(piergen_cli("score " + dir / "nope.jsonl " + dir / "nope2.jsonl").code == 3);
    spit(dir / "blocker", "file");
    CHECK(piergen_cli("generate --count 1 --out " + dir / "blocker/sub").code == 3);
}

TEST_CASE("curriculum writes one corpus per task and respects the split") {
    TempDir dir("curriculum");
    REQUIRE(piergen_cli("generate --count 30 --seed 4 --out " + dir / "out").code == 0);
    const auto r = piergen_cli("curriculum --count 30 --seed 4 --tasks 1,2,3 --formats test_image_only --out " +
                               dir / "out");
    REQUIRE_MESSAGE(r.code == 0, r.out);
    const SplitAssignment split = split_from_json(Json::parse(slurp(dir / "out/split.json")));
    std::set<std::string> test_ids;
    for (auto i : split.test) test_ids.insert(sample_id_for(i));
    std::size_t corpora = 0;
    for (const auto& e : fs::directory_iterator(dir / "out/corpora")) {
        if (!e.is_regular_file()) continue;
        ++corpora;
        const auto rows = lines_of(slurp(e.path()));
        CHECK(rows.size() == split.train.size());
        for (const auto& row : rows) {
            const Json j = Json::parse(row);
            CHECK(test_ids.count(j.at("sample_id").get<std::string>()) == 0);
        }
    }
    CHECK(corpora == 3);

    const auto g = piergen_cli("curriculum --count 30 --seed 4 --tasks 1 --formats answered_pair --guidance on --out " +
                               dir / "out");
    REQUIRE_MESSAGE(g.code == 0, g.out);
    const std::string guided = slurp(dir / "out/corpora/dichotomous_answered_pair_guided.jsonl");
    CHECK(guided.find("Learn the correspondence between structures and parameters from the example image.") !=
          std::string::npos);
}

TEST_CASE("score, stats and reward commands") {
    TempDir dir("score");
    REQUIRE(piergen_cli("generate --count 6 --seed 2 --out " + dir / "out").code == 0);
    const auto manifest = read_manifest(slurp(dir / "out/manifest.jsonl"));
    REQUIRE(manifest.size() == 6);

    // Perfect predictions.
    std::string perfect;
    for (const auto& m : manifest) {
        Json j;
        j["sample_id"] = m.sample_id;
        j["values"] = values_to_json(m.truth, fixture::space().schema);
        perfect += j.dump() + "\n";
    }
    spit(dir / "perfect.jsonl", perfect);
    const auto ok = piergen_cli("score " + dir / "perfect.jsonl " + dir / "out/manifest.jsonl");
    REQUIRE_MESSAGE(ok.code == 0, ok.out);
    const Json rep = Json::parse(slurp(dir / "perfect.jsonl.report.json"));
    CHECK(rep.at("overall").at("correct") == 90);
    CHECK(rep.at("overall").at("total") == 90);

    // Mixed predictions, recounted here entry by entry.
    std::string mixed;
    std::uint64_t hand = 0;
    std::size_t k = 0;
    for (const auto& m : manifest) {
        Json values = Json::object();
        for (const auto& [name, value] : m.truth.values()) {
            const bool right = (k++ % 3) != 0;
            values[name] = right ? value : value + 100;
            hand += right;
        }
        mixed += Json{{"sample_id", m.sample_id}, {"values", values}}.dump() + "\n";
    }
    spit(dir / "mixed.jsonl", mixed);
    const auto mx = piergen_cli("score " + dir / "mixed.jsonl " + dir / "out/manifest.jsonl --report " + dir / "m.json");
    REQUIRE(mx.code == 0);
    CHECK(Json::parse(slurp(dir / "m.json")).at("overall").at("correct") == hand);

    // Malformed line 17.
    std::string bad;
    for (int i = 0; i < 16; ++i) bad += lines_of(perfect)[static_cast<std::size_t>(i % 6)] + "\n";
    bad += "{\"sample_id\": oops}\n";
    spit(dir / "bad.jsonl", bad);
    const auto br = piergen_cli("score " + dir / "bad.jsonl " + dir / "out/manifest.jsonl");
    CHECK(br.code == 2);
    CHECK(br.out.find("line 17") != std::string::npos);

    spit(dir / "unknown.jsonl", "{\"sample_id\": \"pier_424242\", \"values\": {}}\n");
    CHECK(piergen_cli("score " + dir / "unknown.jsonl " + dir / "out/manifest.jsonl").code == 2);

    spit(dir / "empty.jsonl", "");
    const auto st = piergen_cli("stats " + dir / "empty.jsonl");
    REQUIRE_MESSAGE(st.code == 0, st.out);
    const Json stats = Json::parse(st.out);
    CHECK(stats.at("instances") == 0);

    REQUIRE(piergen_cli("curriculum --count 6 --seed 2 --tasks 1 --out " + dir / "out").code == 0);
    const std::string corpus = dir / "out/corpora/dichotomous_test_image_only_plain.jsonl";
    const Json first = Json::parse(lines_of(slurp(corpus)).at(0));
    const std::string label = first.at("truth").at("label").get<std::string>();
    const auto rw = piergen_cli("reward " + corpus + " --line 1 --answer " + label);
    CHECK(rw.code == 0);
    CHECK(rw.out == "1\n");
    const auto st2 = piergen_cli("stats " + corpus);
    CHECK(st2.code == 0);
    CHECK(Json::parse(st2.out).at("instances") == lines_of(slurp(corpus)).size());
}
